#include "hsc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "hsc/error.hpp"
#include "json_io.hpp"

namespace hsc {

namespace {

using detail::json;

std::vector<std::string> ranked_labels(std::span<const double> probabilities, const std::vector<std::string>& labels) {
  std::vector<std::string> out;
  for (const auto& s : top_k(probabilities, probabilities.size())) out.push_back(labels[s.index]);
  return out;
}

std::size_t rank_of(const std::vector<std::string>& ranked, const std::string& gold) {
  auto it = std::find(ranked.begin(), ranked.end(), gold);
  return it == ranked.end() ? 0 : static_cast<std::size_t>(it - ranked.begin()) + 1;
}

double share_within(const std::vector<std::size_t>& ranks, std::size_t k) {
  std::size_t hits = 0;
  for (auto r : ranks) {
    if (r != 0 && r <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double deviation(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  return std::abs(s - 1.0);
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double top_k_accuracy(std::span<const std::vector<std::string>> ranked, std::span<const std::string> gold,
                      std::size_t k) {
  if (ranked.size() != gold.size()) throw DimensionMismatch("ranked lists and gold labels differ in length");
  if (ranked.empty()) throw EmptyInput("top-k accuracy over zero cases");
  if (k < 1) throw BadK("k must be at least 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].size() < k) throw BadK("ranked list " + std::to_string(i) + " is shorter than k");
    if (std::find(ranked[i].begin(), ranked[i].begin() + static_cast<std::ptrdiff_t>(k), gold[i]) !=
        ranked[i].begin() + static_cast<std::ptrdiff_t>(k)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(ranked.size());
}

double token_overlap_f1(std::string_view a, std::string_view b) {
  const auto ta = tokenize(a);
  const auto tb = tokenize(b);
  const std::unordered_set<std::string> sa(ta.begin(), ta.end());
  const std::unordered_set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t overlap = 0;
  for (const auto& t : sa) overlap += sb.count(t);
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(sa.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(sb.size());
  return 2.0 * p * r / (p + r);
}

PrecisionRecall retrieval_precision_recall(std::span<const std::string> retrieved,
                                           std::span<const std::string> gold, double f1_threshold) {
  struct Pair {
    double f1;
    std::size_t r;
    std::size_t g;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < retrieved.size(); ++r) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      const double f1 = token_overlap_f1(retrieved[r], gold[g]);
      if (f1 >= f1_threshold) pairs.push_back({f1, r, g});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    return std::tie(b.f1, retrieved[a.r], gold[a.g]) < std::tie(a.f1, retrieved[b.r], gold[b.g]);
  });
  std::vector<bool> used_r(retrieved.size(), false);
  std::vector<bool> used_g(gold.size(), false);
  PrecisionRecall out;
  for (const auto& p : pairs) {
    if (used_r[p.r] || used_g[p.g]) continue;
    used_r[p.r] = used_g[p.g] = true;
    ++out.matches;
  }
  if (retrieved.empty()) {
    out.precision = 0.0;
    out.precision_defined = false;
  } else {
    out.precision = static_cast<double>(out.matches) / static_cast<double>(retrieved.size());
  }
  if (!gold.empty()) out.recall = static_cast<double>(out.matches) / static_cast<double>(gold.size());
  return out;
}

std::vector<ScoredHeading> word_matching_baseline(std::string_view description, const Manual& manual,
                                                  const StopwordSet& stopwords) {
  if (manual.empty()) throw EmptyManual("word matching needs at least one manual entry");
  std::set<std::string> keywords;
  for (auto& t : tokenize(description)) {
    if (stopwords.count(t) == 0) keywords.insert(std::move(t));
  }
  std::vector<ScoredHeading> out;
  out.reserve(manual.size());
  for (const auto& [heading, entry] : manual) {
    std::unordered_set<std::string> vocabulary;
    for (const auto& s : entry.sentences) {
      for (auto& t : tokenize(s)) vocabulary.insert(std::move(t));
    }
    std::size_t hits = 0;
    for (const auto& k : keywords) hits += vocabulary.count(k);
    const double score = keywords.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(keywords.size());
    out.push_back({heading, score});
  }
  // Manual is ordered by heading, so a stable sort keeps ties ascending.
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredHeading& a, const ScoredHeading& b) { return a.score > b.score; });
  return out;
}

MetricsReport evaluate_pipeline(const PipelineModel& model, const std::vector<DecisionCase>& test,
                                const Manual& manual, const EvaluationOptions& options) {
  if (test.empty()) throw EmptyInput("the test split is empty");
  if (!model.trained()) throw UntrainedModel("cannot evaluate an untrained model");

  MetricsReport report;
  report.ks = options.ks;
  report.case_count = test.size();
  std::vector<std::size_t> heading_ranks, sub_ranks, ablation_ranks, baseline_ranks;
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t recall_cases = 0;
  const bool with_ablation = model.ablation_classifier() != nullptr;

  for (const auto& c : test) {
    const Analysis a = model.analyze(c.description);
    report.max_probability_deviation = std::max(
        {report.max_probability_deviation, deviation(a.heading_probabilities), deviation(a.subheading_probabilities),
         a.ablation_probabilities ? deviation(*a.ablation_probabilities) : 0.0});

    CaseRecord rec;
    rec.id = c.id;
    rec.gold_heading = c.label.heading;
    rec.gold_subheading = c.label.subheading;
    rec.heading_rank = rank_of(ranked_labels(a.heading_probabilities, model.labels().headings()), c.label.heading);
    rec.subheading_rank =
        rank_of(ranked_labels(a.subheading_probabilities, model.labels().subheadings()), c.label.subheading);
    if (a.ablation_probabilities) {
      rec.ablation_rank =
          rank_of(ranked_labels(*a.ablation_probabilities, model.labels().subheadings()), c.label.subheading);
    }
    std::vector<std::string> baseline;
    for (const auto& s : word_matching_baseline(c.description, manual, *model.resources().stopwords)) {
      baseline.push_back(s.heading);
    }
    rec.baseline_rank = rank_of(baseline, c.label.heading);

    rec.retrieved_sentences = a.top_evidence.sentences.size();
    if (c.gold_evidence) {
      const auto pr = retrieval_precision_recall(a.top_evidence.texts(), *c.gold_evidence, options.match_threshold);
      rec.precision = pr.precision;
      rec.recall = pr.recall;
      precision_sum += pr.precision;
      ++report.retrieval_cases;
      if (pr.recall) {
        recall_sum += *pr.recall;
        ++recall_cases;
      }
    }
    heading_ranks.push_back(rec.heading_rank);
    sub_ranks.push_back(rec.subheading_rank);
    ablation_ranks.push_back(rec.ablation_rank);
    baseline_ranks.push_back(rec.baseline_rank);
    report.cases.push_back(std::move(rec));
  }

  for (auto k : options.ks) {
    if (k < 1) throw BadK("k must be at least 1");
    report.heading_top_k[k] = share_within(heading_ranks, k);
    report.subheading_top_k[k] = share_within(sub_ranks, k);
    report.baseline_heading_top_k[k] = share_within(baseline_ranks, k);
    if (with_ablation) report.ablation_subheading_top_k[k] = share_within(ablation_ranks, k);
  }
  if (report.retrieval_cases > 0) {
    report.retrieval_precision = precision_sum / static_cast<double>(report.retrieval_cases);
  }
  if (recall_cases > 0) report.retrieval_recall = recall_sum / static_cast<double>(recall_cases);
  return report;
}

std::string render_metrics_json(const MetricsReport& report) {
  json j = json::object();
  j["case_count"] = report.case_count;
  j["ks"] = report.ks;
  for (const auto& [k, v] : report.heading_top_k) j["hs4_top" + std::to_string(k)] = v;
  for (const auto& [k, v] : report.subheading_top_k) j["hs6_top" + std::to_string(k)] = v;
  for (const auto& [k, v] : report.ablation_subheading_top_k) j["hs6_wo_sentences_top" + std::to_string(k)] = v;
  for (const auto& [k, v] : report.baseline_heading_top_k) j["word_matching_hs4_top" + std::to_string(k)] = v;
  if (report.retrieval_precision) j["retrieval_precision"] = *report.retrieval_precision;
  if (report.retrieval_recall) j["retrieval_recall"] = *report.retrieval_recall;
  j["retrieval_cases"] = report.retrieval_cases;
  j["max_probability_deviation"] = report.max_probability_deviation;
  j["external_baselines"] = json::object();
  auto cases = json::array();
  for (const auto& c : report.cases) {
    json r = {{"id", c.id},
              {"gold_heading", c.gold_heading},
              {"gold_subheading", c.gold_subheading},
              {"heading_rank", c.heading_rank},
              {"subheading_rank", c.subheading_rank},
              {"baseline_rank", c.baseline_rank},
              {"retrieved_sentences", c.retrieved_sentences}};
    if (!report.ablation_subheading_top_k.empty()) r["ablation_rank"] = c.ablation_rank;
    if (c.precision) r["precision"] = *c.precision;
    if (c.recall) r["recall"] = *c.recall;
    cases.push_back(std::move(r));
  }
  j["cases"] = std::move(cases);
  return j.dump(2) + "\n";
}

std::string render_metrics_table(const MetricsReport& report) {
  std::vector<std::size_t> ks = report.ks;
  std::ostringstream out;
  char line[256];
  std::string header = "Models / Top-k accuracy    | HS4 k=1";
  for (auto k : ks) header += " | HS6 k=" + std::to_string(k);
  out << header << "\n" << std::string(header.size(), '-') << "\n";

  auto cell = [](const std::map<std::size_t, double>& m, std::size_t k) {
    auto it = m.find(k);
    return it == m.end() ? std::string("      ") : fixed4(it->second);
  };
  auto row = [&](const char* name, const std::map<std::size_t, double>& hs4, const std::map<std::size_t, double>& hs6) {
    std::snprintf(line, sizeof line, "%-26s | %7s", name, cell(hs4, 1).c_str());
    out << line;
    for (auto k : ks) {
      std::snprintf(line, sizeof line, " | %7s", cell(hs6, k).c_str());
      out << line;
    }
    out << "\n";
  };
  const std::map<std::size_t, double> none;
  row("Word matching", report.baseline_heading_top_k, none);
  if (!report.ablation_subheading_top_k.empty()) {
    row("Pipeline (w/o sentences)", report.heading_top_k, report.ablation_subheading_top_k);
  }
  row("Pipeline", report.heading_top_k, report.subheading_top_k);
  out << "\ncases: " << report.case_count << "\n";
  if (report.retrieval_precision) {
    out << "retrieval precision: " << fixed4(*report.retrieval_precision);
    if (report.retrieval_recall) out << "  recall: " << fixed4(*report.retrieval_recall);
    out << "  (" << report.retrieval_cases << " cases with gold evidence)\n";
  }
  return out.str();
}

}  // namespace hsc
