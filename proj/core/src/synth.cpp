#include "hsc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <unordered_set>

#include "hsc/error.hpp"

namespace hsc {

namespace {

// Distribution code kept local so output depends on the seed only.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return uniform() < p; }
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

const std::vector<std::string> kGeneric = {
    "device",   "apparatus", "unit",     "module",   "housing",  "assembly", "component", "electric",
    "power",    "voltage",   "output",   "input",    "cable",    "frame",    "panel",     "circuit",
    "signal",   "control",   "portable", "industrial", "household", "digital", "analog", "mounted",
    "sealed",   "compact",   "standard", "rated",    "casing",   "terminal",
};

const std::vector<std::string> kFiller = {"the", "with", "and", "of", "for", "a", "in"};

const std::vector<std::string> kLegal = {
    "articles",  "goods",      "presented", "separately", "together",  "classified", "assembled",
    "unassembled", "incomplete", "finished", "essential", "character", "combined",  "principal",
    "function",  "provided",   "covered",   "elsewhere",  "specified", "included",
};

class WordFactory {
 public:
  explicit WordFactory(Rng& rng) : rng_(rng) {
    for (const auto& g : kGeneric) used_.insert(g);
    for (const auto& w : default_stopwords()) used_.insert(w);
  }

  std::string make() {
    static const std::string consonants = "bcdfghklmnprstvz";
    static const std::string vowels = "aeiou";
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + rng_.below(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        w.push_back(consonants[rng_.below(consonants.size())]);
        w.push_back(vowels[rng_.below(vowels.size())]);
      }
      if (rng_.chance(0.5)) w.push_back(consonants[rng_.below(consonants.size())]);
      if (used_.insert(w).second && used_.count(w + "ic") == 0) {
        used_.insert(w + "ic");
        return w;
      }
    }
  }

  std::vector<std::string> make(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make());
    return out;
  }

 private:
  Rng& rng_;
  std::unordered_set<std::string> used_;
};

struct SubheadingVocab {
  std::string code;
  std::vector<std::string> manual_terms;
  std::vector<std::string> description_terms;  // [0] is the variant of manual_terms[0]
};

struct HeadingVocab {
  std::string code;
  std::vector<std::string> manual_terms;
  std::vector<std::string> description_terms;
  std::vector<SubheadingVocab> subs;
};

std::vector<double> random_unit(Rng& rng, std::size_t d) {
  std::vector<double> v(d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.gaussian();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

// Unit vector at cosine 1/sqrt(1 + 0.2²) from unit vector `base`.
std::vector<double> variant_of(Rng& rng, const std::vector<double>& base) {
  auto noise = random_unit(rng, base.size());
  double dot = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) dot += noise[i] * base[i];
  double norm = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    noise[i] -= dot * base[i];
    norm += noise[i] * noise[i];
  }
  norm = std::sqrt(norm);
  std::vector<double> v(base.size());
  double vnorm = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    v[i] = base[i] + 0.2 * noise[i] / norm;
    vnorm += v[i] * v[i];
  }
  vnorm = std::sqrt(vnorm);
  for (auto& x : v) x /= vnorm;
  return v;
}

// Unit vector along direction/‖direction‖ + 1.3 · (random unit vector).
std::vector<double> near(Rng& rng, const std::vector<double>& direction) {
  double dnorm = 0.0;
  for (double x : direction) dnorm += x * x;
  dnorm = std::sqrt(dnorm);
  const auto r = random_unit(rng, direction.size());
  std::vector<double> v(direction.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = direction[i] / dnorm + 1.3 * r[i];
    norm += v[i] * v[i];
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

std::string join(const std::vector<std::string>& words, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

std::vector<std::string> sample(Rng& rng, const std::vector<std::string>& pool, std::size_t n) {
  auto copy = pool;
  rng.shuffle(copy);
  copy.resize(std::min(n, copy.size()));
  return copy;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string dotted(const std::string& heading) { return heading.substr(0, 2) + "." + heading.substr(2); }

Date date_from_days(std::chrono::sys_days d) { return Date{d}; }

Date random_date(Rng& rng, Date from, Date to) {
  const auto a = std::chrono::sys_days{from};
  const auto b = std::chrono::sys_days{to};
  const auto span = static_cast<std::size_t>((b - a).count()) + 1;
  return date_from_days(a + std::chrono::days{static_cast<int>(rng.below(span))});
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SynthConfig& config) {
  if (config.headings == 0 || config.headings > 99 || config.subheadings_per_heading == 0 ||
      config.subheadings_per_heading > 9 || config.dimension == 0) {
    throw InputError("synthetic corpus: headings must be 1..99, subheadings per heading 1..9, dimension > 0");
  }
  if (config.train_per_subheading + config.validation_per_subheading + config.test_per_subheading == 0) {
    throw InputError("synthetic corpus: no cases requested");
  }
  Rng rng(config.seed);
  WordFactory words(rng);

  std::vector<HeadingVocab> vocab;
  for (std::size_t h = 0; h < config.headings; ++h) {
    HeadingVocab hv;
    char code[8];
    std::snprintf(code, sizeof code, "85%02zu", h + 1);
    hv.code = code;
    hv.manual_terms = words.make(6);
    hv.description_terms = words.make(8);
    for (std::size_t s = 0; s < config.subheadings_per_heading; ++s) {
      SubheadingVocab sv;
      sv.code = hv.code + std::to_string(s + 1) + "0";
      sv.manual_terms = words.make(3);
      sv.description_terms = words.make(3);
      sv.description_terms.insert(sv.description_terms.begin(), sv.manual_terms[0] + "ic");
      hv.subs.push_back(std::move(sv));
    }
    vocab.push_back(std::move(hv));
  }

  // Manual entries.
  SyntheticCorpus corpus{{}, {}, WordVectorTable(config.dimension)};
  std::vector<std::size_t> title_index(config.headings, 0);
  for (std::size_t h = 0; h < config.headings; ++h) {
    const auto& hv = vocab[h];
    ManualEntry entry;
    entry.heading = hv.code;
    entry.sentences.push_back(dotted(hv.code) + " " + capitalize(join(sample(rng, hv.manual_terms, 4), ", ")) +
                              " and similar " + join(sample(rng, kGeneric, 2)) + " articles.");
    for (const auto& sv : hv.subs) {
      entry.sentences.push_back(sv.code.substr(0, 4) + "." + sv.code.substr(4) + " " +
                                capitalize(join(sv.manual_terms, " ")) + " of the " + rng.pick(hv.manual_terms) +
                                " type.");
    }
    entry.sentences.push_back("This heading also covers " + join(sample(rng, hv.manual_terms, 2), " and ") +
                              ", " + join(sample(rng, kLegal, 2), " or ") + ".");
    entry.sentences.push_back("The " + join(sample(rng, kLegal, 4), " ") +
                              " may be presented separately or together.");
    std::size_t other = rng.below(config.headings);
    if (config.headings > 1) {
      while (other == h) other = rng.below(config.headings);
    }
    entry.sentences.push_back("The heading excludes " + join(sample(rng, vocab[other].manual_terms, 2), " and ") +
                              ", which fall in heading " + dotted(vocab[other].code) + ".");
    entry.sentences.push_back("PARTS: " + capitalize(join(sample(rng, hv.manual_terms, 2))) + " fitted to " +
                              join(sample(rng, kLegal, 2)) + ".");
    corpus.manual.emplace(entry.heading, std::move(entry));
  }

  // Cases.
  const Date train_from{std::chrono::year{2018}, std::chrono::January, std::chrono::day{1}};
  const Date train_to{std::chrono::year{2021}, std::chrono::June, std::chrono::day{30}};
  const Date val_from{std::chrono::year{2021}, std::chrono::July, std::chrono::day{1}};
  const Date val_to{std::chrono::year{2021}, std::chrono::September, std::chrono::day{30}};
  const Date test_from{std::chrono::year{2021}, std::chrono::October, std::chrono::day{1}};
  const Date test_to{std::chrono::year{2021}, std::chrono::December, std::chrono::day{31}};

  enum class Part { train, validation, test };
  std::vector<DecisionCase> cases;
  bool anchored = false;
  for (std::size_t h = 0; h < config.headings; ++h) {
    const auto& hv = vocab[h];
    for (std::size_t s = 0; s < hv.subs.size(); ++s) {
      const auto& sv = hv.subs[s];
      auto emit = [&](Part part) {
        std::vector<std::string> tokens;
        for (auto& w : sample(rng, hv.description_terms, 2)) tokens.push_back(w);
        if (rng.chance(0.7)) {
          tokens.push_back(sv.description_terms[0]);
          tokens.push_back(sv.description_terms[1 + rng.below(sv.description_terms.size() - 1)]);
        } else {
          for (auto& w : sample(rng, {sv.description_terms.begin() + 1, sv.description_terms.end()}, 2)) {
            tokens.push_back(w);
          }
        }
        if (rng.chance(0.25)) tokens.push_back(rng.pick(hv.manual_terms));
        for (auto& w : sample(rng, kGeneric, 3)) tokens.push_back(w);
        if (config.headings > 1) {
          std::size_t other = rng.below(config.headings);
          while (other == h) other = rng.below(config.headings);
          tokens.push_back(rng.pick(vocab[other].manual_terms));
        }
        for (auto& w : sample(rng, kFiller, 3)) tokens.push_back(w);
        rng.shuffle(tokens);
        tokens.push_back("rated");
        tokens.push_back(std::to_string(10 + rng.below(990)) + (rng.chance(0.5) ? "w" : "v"));

        DecisionCase c;
        c.description = capitalize(join(tokens)) + ".";
        c.label = parse_hs_code(sv.code);
        c.origin = rng.chance(0.95) ? Origin::international : Origin::domestic;
        switch (part) {
          case Part::train:
            c.decision_date = random_date(rng, train_from, train_to);
            break;
          case Part::validation:
            c.decision_date = random_date(rng, val_from, val_to);
            break;
          case Part::test:
            c.decision_date = anchored ? random_date(rng, test_from, test_to) : test_to;
            anchored = true;
            break;
        }
        if (part != Part::train) {
          const auto& sentences = corpus.manual.at(hv.code).sentences;
          c.gold_evidence = std::vector<std::string>{sentences[title_index[h]], sentences[1 + s]};
        }
        cases.push_back(std::move(c));
      };
      for (std::size_t i = 0; i < config.train_per_subheading; ++i) emit(Part::train);
      for (std::size_t i = 0; i < config.validation_per_subheading; ++i) emit(Part::validation);
      for (std::size_t i = 0; i < config.test_per_subheading; ++i) emit(Part::test);
    }
  }
  std::stable_sort(cases.begin(), cases.end(),
                   [](const DecisionCase& a, const DecisionCase& b) { return a.decision_date < b.decision_date; });
  for (std::size_t i = 0; i < cases.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "SYN-%05zu", i + 1);
    cases[i].id = id;
  }
  corpus.cases = std::move(cases);

  // Vectors: class terms cluster around heading and subheading directions;
  // everything else is an independent random unit vector.
  std::set<std::string> vocabulary;
  auto collect = [&](const std::string& text) {
    for (auto& t : tokenize(text)) {
      if (std::none_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) vocabulary.insert(t);
    }
  };
  for (const auto& [heading, entry] : corpus.manual) {
    for (const auto& s : entry.sentences) collect(s);
  }
  for (const auto& c : corpus.cases) collect(c.description);
  for (const auto& w : default_stopwords()) vocabulary.insert(w);

  for (const auto& hv : vocab) {
    const auto centroid = random_unit(rng, config.dimension);
    for (const auto& w : hv.manual_terms) corpus.vectors.insert(w, near(rng, centroid));
    for (const auto& w : hv.description_terms) corpus.vectors.insert(w, near(rng, centroid));
    for (const auto& sv : hv.subs) {
      auto topic = random_unit(rng, config.dimension);
      for (std::size_t i = 0; i < topic.size(); ++i) topic[i] += centroid[i];
      const auto base = near(rng, topic);
      corpus.vectors.insert(sv.manual_terms[0], base);
      corpus.vectors.insert(sv.description_terms[0], variant_of(rng, base));
      for (std::size_t i = 1; i < sv.manual_terms.size(); ++i) corpus.vectors.insert(sv.manual_terms[i], near(rng, topic));
      for (std::size_t i = 1; i < sv.description_terms.size(); ++i) {
        corpus.vectors.insert(sv.description_terms[i], near(rng, topic));
      }
    }
  }
  for (const auto& t : vocabulary) {
    if (!corpus.vectors.contains(t)) corpus.vectors.insert(t, random_unit(rng, config.dimension));
  }
  return corpus;
}

}  // namespace hsc
