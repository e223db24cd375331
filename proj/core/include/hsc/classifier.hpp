#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hsc/encoder.hpp"

namespace hsc {

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double l2_penalty = 1e-4;

  /// Throws InputError on epochs < 1, batch_size < 1, negative rates.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainReport {
  std::vector<double> training_loss;        // objective after each epoch
  std::vector<double> validation_accuracy;  // top-1 after each epoch
  std::size_t best_epoch = 0;               // 0-based
  bool validation_empty = false;
};

/// Multinomial logistic head: probabilities = softmax(Wᵀx + b) with W
/// stored d × C row-major. Weights start at zero.
class SoftmaxClassifier {
 public:
  SoftmaxClassifier(std::size_t input_dimension, std::vector<std::string> labels);
  SoftmaxClassifier(std::size_t input_dimension, std::vector<std::string> labels, std::vector<double> weights,
                    std::vector<double> bias);

  std::size_t input_dimension() const noexcept { return input_dimension_; }
  std::size_t class_count() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> bias() const noexcept { return bias_; }
  std::span<double> weights() noexcept { return weights_; }
  std::span<double> bias() noexcept { return bias_; }

  double weight(std::size_t feature, std::size_t cls) const { return weights_[feature * class_count() + cls]; }

  /// Throws DimensionMismatch.
  std::vector<double> logits(std::span<const double> input) const;
  std::vector<double> predict_proba(std::span<const double> input) const;

  friend bool operator==(const SoftmaxClassifier&, const SoftmaxClassifier&) = default;

 private:
  std::size_t input_dimension_;
  std::vector<std::string> labels_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// −ln p[true], with p floored at 1e-12. Throws IndexOutOfRange.
double cross_entropy(std::size_t true_label, std::span<const double> probabilities);

struct LossGradient {
  double loss = 0.0;                 // mean cross-entropy + (l2/2)·‖W‖²
  std::vector<double> weight_grad;   // same layout as weights()
  std::vector<double> bias_grad;
};

/// Objective and its analytic gradient over a batch. The bias is not
/// penalized.
LossGradient loss_and_gradient(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                               std::span<const std::size_t> labels, double l2_penalty);
double objective(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                 std::span<const std::size_t> labels, double l2_penalty);

/// Validation labels may carry this value for examples whose gold class is
/// outside the label set; they always count as misses.
inline constexpr std::size_t kUnknownLabel = std::numeric_limits<std::size_t>::max();

struct TrainResult {
  SoftmaxClassifier classifier;
  TrainReport report;
};

/// Mini-batch gradient descent from zero weights, reshuffling each epoch
/// with a generator seeded from config.seed. Returns the parameters of the
/// epoch with the best validation top-1 accuracy (earliest on ties), or of
/// the last epoch when there is no validation data.
/// Throws EmptyInput, DimensionMismatch, IndexOutOfRange.
TrainResult train(std::span<const Embedding> inputs, std::span<const std::size_t> labels,
                  std::span<const Embedding> validation_inputs, std::span<const std::size_t> validation_labels,
                  std::vector<std::string> class_labels, const TrainConfig& config);

struct ScoredClass {
  std::size_t index = 0;
  double probability = 0.0;

  friend bool operator==(const ScoredClass&, const ScoredClass&) = default;
};

/// k best classes by descending probability, ties to the lower index.
/// Throws BadK unless 1 ≤ k ≤ size.
std::vector<ScoredClass> top_k(std::span<const double> probabilities, std::size_t k);

struct ClassifierCheckpoint {
  SoftmaxClassifier classifier;
  TrainConfig config;
};

/// JSON text holding d, C, labels, W, bias and the training config; doubles
/// are written in round-trip form so reading restores identical values.
void write_classifier(std::ostream& out, const SoftmaxClassifier& classifier, const TrainConfig& config);
ClassifierCheckpoint read_classifier(std::istream& in, const std::string& source_name);

}  // namespace hsc
