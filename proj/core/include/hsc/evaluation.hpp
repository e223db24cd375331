#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/corpus.hpp"
#include "hsc/pipeline.hpp"
#include "hsc/textproc.hpp"

namespace hsc {

/// Fraction of cases whose gold label is among the first k of its ranked
/// list. Throws BadK when k < 1 or any list is shorter than k;
/// DimensionMismatch when the spans differ in length; EmptyInput.
double top_k_accuracy(std::span<const std::vector<std::string>> ranked, std::span<const std::string> gold,
                      std::size_t k);

/// F1 of the token sets of two sentences (tokenize() normalisation).
double token_overlap_f1(std::string_view a, std::string_view b);

struct PrecisionRecall {
  double precision = 0.0;
  bool precision_defined = true;  // false when nothing was retrieved (precision reported as 0)
  std::optional<double> recall;   // nullopt when the gold list is empty
  std::size_t matches = 0;
};

/// Greedy best-first one-to-one matching of retrieved to gold sentences:
/// pairs with token-overlap F1 ≥ threshold are taken in descending F1
/// order, ties broken on sentence text so the result does not depend on
/// the order of either list.
PrecisionRecall retrieval_precision_recall(std::span<const std::string> retrieved,
                                           std::span<const std::string> gold, double f1_threshold = 0.6);

struct ScoredHeading {
  std::string heading;
  double score = 0.0;

  friend bool operator==(const ScoredHeading&, const ScoredHeading&) = default;
};

/// Share of the description's unique non-stopword tokens that occur anywhere
/// in each heading's manual text. Descending score, ties to the smaller
/// heading code.
std::vector<ScoredHeading> word_matching_baseline(std::string_view description, const Manual& manual,
                                                  const StopwordSet& stopwords);

struct CaseRecord {
  std::string id;
  std::string gold_heading;
  std::string gold_subheading;
  std::size_t heading_rank = 0;  // 1-based; 0 when the gold label is outside the label space
  std::size_t subheading_rank = 0;
  std::size_t ablation_rank = 0;
  std::size_t baseline_rank = 0;
  std::size_t retrieved_sentences = 0;
  std::optional<double> precision;
  std::optional<double> recall;
};

struct MetricsReport {
  std::vector<std::size_t> ks;
  std::size_t case_count = 0;
  std::map<std::size_t, double> heading_top_k;
  std::map<std::size_t, double> subheading_top_k;
  std::map<std::size_t, double> ablation_subheading_top_k;  // empty when no ablation was trained
  std::map<std::size_t, double> baseline_heading_top_k;
  std::optional<double> retrieval_precision;  // mean over cases with gold evidence
  std::optional<double> retrieval_recall;
  std::size_t retrieval_cases = 0;
  double max_probability_deviation = 0.0;  // max |Σp − 1| over every scored vector
  std::vector<CaseRecord> cases;
};

struct EvaluationOptions {
  std::vector<std::size_t> ks = {1, 3, 5};
  double match_threshold = 0.6;
};

/// Runs the model and the word-matching baseline over `test`. A k beyond
/// the number of classes of a level is evaluated over the full ranking.
/// Throws EmptyInput, UntrainedModel.
MetricsReport evaluate_pipeline(const PipelineModel& model, const std::vector<DecisionCase>& test,
                                const Manual& manual, const EvaluationOptions& options = {});

/// Flat JSON: hs4_top{k}, hs6_top{k}, hs6_wo_sentences_top{k},
/// word_matching_hs4_top{k}, retrieval_precision/recall, cases, ...
std::string render_metrics_json(const MetricsReport& report);
/// Plain-text accuracy table with one row per model variant.
std::string render_metrics_table(const MetricsReport& report);

}  // namespace hsc
