#pragma once

// Independent reference implementations used to check the library. None of
// these call into the code paths they verify.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hsc/classifier.hpp"
#include "hsc/textproc.hpp"

namespace hsc::oracle {

/// Plain cosine with its own arithmetic; 0 for a zero-norm side.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

/// Σ_t idf(t) · max(0, max_u cos) by an explicit double loop.
double alignment_score(const std::set<std::string>& query, const IdfTable& idf, const TokenSequence& sentence,
                       const WordVectorTable& vectors);

/// Selection order of the greedy coverage retrieval, found by enumerating
/// every ordered sequence of distinct sentences and keeping the one that
/// satisfies the selection and stopping rules. Returns nullopt when zero or
/// more than one sequence qualifies (which would indicate a rule ambiguity).
struct AirOracleResult {
  std::vector<std::size_t> order;
  std::set<std::string> covered;
  std::set<std::string> uncovered;
};
std::optional<AirOracleResult> exhaustive_air(const std::set<std::string>& keywords,
                                              const std::vector<TokenSequence>& sentences, const IdfTable& idf,
                                              const WordVectorTable& vectors, std::size_t max_sentences,
                                              double coverage_threshold);

/// Mean cross-entropy + (l2/2)‖W‖² computed with log-sum-exp from raw
/// parameters (W row-major d × C).
double softmax_objective(const std::vector<double>& weights, const std::vector<double>& bias, std::size_t d,
                         std::size_t c, std::span<const Embedding> inputs, std::span<const std::size_t> labels,
                         double l2);

/// Central differences of softmax_objective over every weight then bias.
std::vector<double> finite_difference_gradient(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                                               std::span<const std::size_t> labels, double l2, double h = 1e-5);

/// ‖a − b‖ / max(‖a‖, ‖b‖, 1e-12).
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

/// Logits drawn i.i.d. N(0, spread²) per class with labels sampled from
/// softmax(logits); the set is calibrated at T = 1 by construction.
struct CalibrationSample {
  std::vector<std::vector<double>> logits;
  std::vector<std::size_t> labels;
};
CalibrationSample calibrated_logits(std::size_t n, std::size_t classes, double spread, std::uint64_t seed);

/// Random single-instance problem for the retrieval oracle: ≤ 5 sentences,
/// ≤ 6 keywords, 3-dimensional toy vectors with planted near-duplicates.
struct AirInstance {
  std::set<std::string> keywords;
  std::vector<std::string> sentence_texts;
  std::vector<TokenSequence> sentences;
  WordVectorTable vectors{3};
  std::optional<IdfTable> idf;
  std::size_t max_sentences = 7;
  double coverage_threshold = 0.95;
};
AirInstance random_air_instance(std::uint64_t seed);

}  // namespace hsc::oracle
