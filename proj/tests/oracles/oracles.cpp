#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace hsc::oracle {

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  long double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<long double>(u[i]) * v[i];
    uu += static_cast<long double>(u[i]) * u[i];
    vv += static_cast<long double>(v[i]) * v[i];
  }
  if (uu == 0 || vv == 0) return 0.0;
  return static_cast<double>(dot / std::sqrt(uu * vv));
}

namespace {

std::vector<double> vec(const WordVectorTable& t, const std::string& token) {
  auto s = t.vector(token);
  return {s.begin(), s.end()};
}

// best[t][i]: best cosine of keyword t in sentence i (or nullopt when empty).
using Table = std::vector<std::vector<std::optional<double>>>;

Table alignment_table(const std::vector<std::string>& terms, const std::vector<TokenSequence>& sentences,
                      const WordVectorTable& vectors) {
  Table table(terms.size(), std::vector<std::optional<double>>(sentences.size()));
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      for (const auto& u : sentences[i]) {
        const double c = cosine(vec(vectors, terms[t]), vec(vectors, u));
        if (!table[t][i] || c > *table[t][i]) table[t][i] = c;
      }
    }
  }
  return table;
}

}  // namespace

double alignment_score(const std::set<std::string>& query, const IdfTable& idf, const TokenSequence& sentence,
                       const WordVectorTable& vectors) {
  double total = 0.0;
  for (const auto& t : query) {
    double best = 0.0;
    bool any = false;
    for (const auto& u : sentence) {
      const double c = cosine(vec(vectors, t), vec(vectors, u));
      if (!any || c > best) best = c;
      any = true;
    }
    if (any && best > 0.0) total += idf.idf(t) * best;
  }
  return total;
}

std::optional<AirOracleResult> exhaustive_air(const std::set<std::string>& keywords,
                                              const std::vector<TokenSequence>& sentences, const IdfTable& idf,
                                              const WordVectorTable& vectors, std::size_t max_sentences,
                                              double coverage_threshold) {
  const std::vector<std::string> terms(keywords.begin(), keywords.end());
  const auto table = alignment_table(terms, sentences, vectors);
  const std::size_t n = sentences.size();

  auto covers = [&](std::size_t t, std::size_t i) { return table[t][i] && *table[t][i] >= coverage_threshold; };
  auto score = [&](std::size_t i, const std::vector<bool>& open) {
    double s = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (open[t] && table[t][i] && *table[t][i] > 0.0) s += idf.idf(terms[t]) * *table[t][i];
    }
    return s;
  };
  // Rule-following choice for the next step: best score, lowest index.
  auto next_choice = [&](const std::vector<bool>& taken, const std::vector<bool>& open) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double s = score(i, open);
      if (!best || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    return best;
  };

  std::vector<AirOracleResult> valid;
  std::vector<std::size_t> seq;
  std::function<void()> explore = [&]() {
    // Replay the sequence and check every rule along the way.
    std::vector<bool> taken(n, false);
    std::vector<bool> open(terms.size(), true);
    for (std::size_t j = 0; j < seq.size(); ++j) {
      if (std::none_of(open.begin(), open.end(), [](bool b) { return b; })) return;
      if (j >= max_sentences) return;
      auto choice = next_choice(taken, open);
      if (!choice || *choice != seq[j]) return;
      bool gained = false;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        if (open[t] && covers(t, seq[j])) {
          open[t] = false;
          gained = true;
        }
      }
      if (!gained) return;
      taken[seq[j]] = true;
    }
    // Does the process stop here?
    const bool all_covered = std::none_of(open.begin(), open.end(), [](bool b) { return b; });
    bool stops = all_covered || seq.size() >= max_sentences;
    if (!stops) {
      auto choice = next_choice(taken, open);
      if (!choice) {
        stops = true;
      } else {
        bool gains = false;
        for (std::size_t t = 0; t < terms.size(); ++t) gains = gains || (open[t] && covers(t, *choice));
        stops = !gains;
      }
    }
    if (stops) {
      AirOracleResult r;
      r.order = seq;
      for (std::size_t t = 0; t < terms.size(); ++t) (open[t] ? r.uncovered : r.covered).insert(terms[t]);
      valid.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(seq.begin(), seq.end(), i) != seq.end()) continue;
      seq.push_back(i);
      explore();
      seq.pop_back();
    }
  };
  explore();
  if (valid.size() != 1) return std::nullopt;
  return valid.front();
}

double softmax_objective(const std::vector<double>& weights, const std::vector<double>& bias, std::size_t d,
                         std::size_t c, std::span<const Embedding> inputs, std::span<const std::size_t> labels,
                         double l2) {
  long double total = 0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    std::vector<long double> z(c);
    for (std::size_t k = 0; k < c; ++k) {
      z[k] = bias[k];
      for (std::size_t i = 0; i < d; ++i) z[k] += static_cast<long double>(inputs[n][i]) * weights[i * c + k];
    }
    const long double peak = *std::max_element(z.begin(), z.end());
    long double sum = 0;
    for (auto v : z) sum += std::exp(v - peak);
    total += -(z[labels[n]] - peak - std::log(sum));
  }
  long double penalty = 0;
  for (double w : weights) penalty += static_cast<long double>(w) * w;
  return static_cast<double>(total / inputs.size() + 0.5L * l2 * penalty);
}

std::vector<double> finite_difference_gradient(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                                               std::span<const std::size_t> labels, double l2, double h) {
  const std::size_t d = model.input_dimension();
  const std::size_t c = model.class_count();
  std::vector<double> w(model.weights().begin(), model.weights().end());
  std::vector<double> b(model.bias().begin(), model.bias().end());
  std::vector<double> grad;
  auto f = [&] { return softmax_objective(w, b, d, c, inputs, labels, l2); };
  for (auto* params : {&w, &b}) {
    for (auto& p : *params) {
      const double saved = p;
      p = saved + h;
      const double up = f();
      p = saved - h;
      const double down = f();
      p = saved;
      grad.push_back((up - down) / (2.0 * h));
    }
  }
  return grad;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

CalibrationSample calibrated_logits(std::size_t n, std::size_t classes, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CalibrationSample out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(classes);
    for (auto& v : z) v = normal(rng);
    const double peak = *std::max_element(z.begin(), z.end());
    std::vector<double> p(classes);
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) sum += (p[k] = std::exp(z[k] - peak));
    double u = unit(rng) * sum;
    std::size_t label = classes - 1;
    for (std::size_t k = 0; k < classes; ++k) {
      if (u < p[k]) {
        label = k;
        break;
      }
      u -= p[k];
    }
    out.logits.push_back(std::move(z));
    out.labels.push_back(label);
  }
  return out;
}

AirInstance random_air_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto below = [&](std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng); };

  AirInstance inst;
  const std::vector<std::string> vocab = {"alpha", "bravo", "charlie", "delta", "echo",
                                          "foxtrot", "golf", "hotel", "india"};
  std::vector<std::vector<double>> base;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (i == vocab.size() - 1) break;  // "india" stays out of vocabulary
    std::vector<double> v(3);
    if (i >= 5 && below(3) != 0) {
      // Planted near-duplicate of an earlier token.
      const auto& src = base[below(5)];
      for (std::size_t k = 0; k < 3; ++k) v[k] = src[k] + 0.08 * normal(rng);
    } else {
      for (auto& x : v) x = normal(rng);
    }
    base.push_back(v);
    inst.vectors.insert(vocab[i], v);
  }

  const std::size_t keyword_count = 1 + below(6);
  while (inst.keywords.size() < keyword_count) inst.keywords.insert(vocab[below(vocab.size())]);
  const std::size_t sentence_count = 1 + below(5);
  for (std::size_t s = 0; s < sentence_count; ++s) {
    TokenSequence tokens;
    const std::size_t len = below(5);
    for (std::size_t k = 0; k < len; ++k) tokens.push_back(vocab[below(vocab.size())]);
    std::string text;
    for (const auto& t : tokens) text += (text.empty() ? "" : " ") + t;
    if (text.empty()) text = "--";
    inst.sentence_texts.push_back(text);
    inst.sentences.push_back(tokens);
  }
  std::vector<TokenSequence> docs = inst.sentences;
  docs.emplace_back(inst.keywords.begin(), inst.keywords.end());
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string> unique(doc.begin(), doc.end());
    for (const auto& t : unique) ++df[t];
  }
  inst.idf.emplace(docs.size(), std::move(df));
  inst.max_sentences = 1 + below(7);
  return inst;
}

}  // namespace hsc::oracle
