#include "hsc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "hsc/error.hpp"
#include "json_io.hpp"

namespace hsc {

namespace {

void check_inputs(std::span<const Embedding> inputs, std::size_t d) {
  for (const auto& x : inputs) {
    if (x.size() != d) {
      throw DimensionMismatch("input of length " + std::to_string(x.size()) + ", classifier expects " +
                              std::to_string(d));
    }
  }
}

// Fisher-Yates over the raw engine output so the permutation depends only on
// the seed, not on the standard library's distribution implementation.
void shuffle_indices(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double accuracy(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                std::span<const std::size_t> labels) {
  if (inputs.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (labels[i] != kUnknownLabel && argmax(model.logits(inputs[i])) == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(inputs.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InputError("epochs must be at least 1");
  if (batch_size < 1) throw InputError("batch_size must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InputError("learning_rate must be a finite non-negative number");
  }
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) {
    throw InputError("l2_penalty must be a finite non-negative number");
  }
}

SoftmaxClassifier::SoftmaxClassifier(std::size_t input_dimension, std::vector<std::string> labels)
    : SoftmaxClassifier(input_dimension, labels, std::vector<double>(input_dimension * labels.size(), 0.0),
                        std::vector<double>(labels.size(), 0.0)) {}

SoftmaxClassifier::SoftmaxClassifier(std::size_t input_dimension, std::vector<std::string> labels,
                                     std::vector<double> weights, std::vector<double> bias)
    : input_dimension_(input_dimension),
      labels_(std::move(labels)),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (input_dimension_ == 0) throw DimensionMismatch("classifier input dimension must be positive");
  if (labels_.empty()) throw InputError("classifier needs at least one class");
  if (weights_.size() != input_dimension_ * labels_.size() || bias_.size() != labels_.size()) {
    throw DimensionMismatch("classifier parameter shapes do not match d × C");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(weights_.begin(), weights_.end(), finite) || !std::all_of(bias_.begin(), bias_.end(), finite)) {
    throw InputError("classifier parameters must be finite");
  }
}

std::vector<double> SoftmaxClassifier::logits(std::span<const double> input) const {
  if (input.size() != input_dimension_) {
    throw DimensionMismatch("input of length " + std::to_string(input.size()) + ", classifier expects " +
                            std::to_string(input_dimension_));
  }
  const std::size_t c = class_count();
  std::vector<double> z(bias_.begin(), bias_.end());
  for (std::size_t i = 0; i < input_dimension_; ++i) {
    const double xi = input[i];
    if (xi == 0.0) continue;
    const double* row = weights_.data() + i * c;
    for (std::size_t k = 0; k < c; ++k) z[k] += xi * row[k];
  }
  return z;
}

std::vector<double> SoftmaxClassifier::predict_proba(std::span<const double> input) const {
  return softmax(logits(input));
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

double cross_entropy(std::size_t true_label, std::span<const double> probabilities) {
  if (true_label >= probabilities.size()) {
    throw IndexOutOfRange("label index " + std::to_string(true_label) + " outside " +
                          std::to_string(probabilities.size()) + " classes");
  }
  return -std::log(std::max(probabilities[true_label], 1e-12));
}

LossGradient loss_and_gradient(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                               std::span<const std::size_t> labels, double l2_penalty) {
  const std::size_t d = model.input_dimension();
  const std::size_t c = model.class_count();
  if (inputs.size() != labels.size()) throw DimensionMismatch("inputs and labels differ in length");
  if (inputs.empty()) throw EmptyInput("loss over an empty batch");
  check_inputs(inputs, d);

  LossGradient out;
  out.weight_grad.assign(d * c, 0.0);
  out.bias_grad.assign(c, 0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    if (labels[n] >= c) throw IndexOutOfRange("training label outside the class range");
    auto p = model.predict_proba(inputs[n]);
    total += cross_entropy(labels[n], p);
    p[labels[n]] -= 1.0;
    const auto& x = inputs[n];
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      double* row = out.weight_grad.data() + i * c;
      for (std::size_t k = 0; k < c; ++k) row[k] += xi * p[k];
    }
    for (std::size_t k = 0; k < c; ++k) out.bias_grad[k] += p[k];
  }
  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  const auto w = model.weights();
  double penalty = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.weight_grad[j] = out.weight_grad[j] * inv_n + l2_penalty * w[j];
    penalty += w[j] * w[j];
  }
  for (auto& g : out.bias_grad) g *= inv_n;
  out.loss = total * inv_n + 0.5 * l2_penalty * penalty;
  return out;
}

double objective(const SoftmaxClassifier& model, std::span<const Embedding> inputs,
                 std::span<const std::size_t> labels, double l2_penalty) {
  if (inputs.size() != labels.size()) throw DimensionMismatch("inputs and labels differ in length");
  if (inputs.empty()) throw EmptyInput("objective over an empty set");
  double total = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    if (labels[n] >= model.class_count()) throw IndexOutOfRange("label outside the class range");
    total += cross_entropy(labels[n], model.predict_proba(inputs[n]));
  }
  double penalty = 0.0;
  for (double w : model.weights()) penalty += w * w;
  return total / static_cast<double>(inputs.size()) + 0.5 * l2_penalty * penalty;
}

TrainResult train(std::span<const Embedding> inputs, std::span<const std::size_t> labels,
                  std::span<const Embedding> validation_inputs, std::span<const std::size_t> validation_labels,
                  std::vector<std::string> class_labels, const TrainConfig& config) {
  config.validate();
  if (inputs.empty()) throw EmptyInput("no training examples");
  if (inputs.size() != labels.size()) throw DimensionMismatch("inputs and labels differ in length");
  if (validation_inputs.size() != validation_labels.size()) {
    throw DimensionMismatch("validation inputs and labels differ in length");
  }
  const std::size_t d = inputs.front().size();
  check_inputs(inputs, d);
  check_inputs(validation_inputs, d);
  for (auto y : labels) {
    if (y >= class_labels.size()) throw IndexOutOfRange("training label outside the class range");
  }
  for (auto y : validation_labels) {
    if (y != kUnknownLabel && y >= class_labels.size()) {
      throw IndexOutOfRange("validation label outside the class range");
    }
  }

  SoftmaxClassifier model(d, std::move(class_labels));
  SoftmaxClassifier best = model;
  TrainReport report;
  report.validation_empty = validation_inputs.empty();
  double best_accuracy = -1.0;

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<Embedding> batch_inputs;
  std::vector<std::size_t> batch_labels;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      batch_inputs.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_inputs.push_back(inputs[order[i]]);
        batch_labels.push_back(labels[order[i]]);
      }
      const auto grad = loss_and_gradient(model, batch_inputs, batch_labels, config.l2_penalty);
      auto w = model.weights();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= config.learning_rate * grad.weight_grad[j];
      auto b = model.bias();
      for (std::size_t k = 0; k < b.size(); ++k) b[k] -= config.learning_rate * grad.bias_grad[k];
    }
    report.training_loss.push_back(objective(model, inputs, labels, config.l2_penalty));
    if (report.validation_empty) {
      report.validation_accuracy.push_back(0.0);
      best = model;
      report.best_epoch = static_cast<std::size_t>(epoch);
      continue;
    }
    const double acc = accuracy(model, validation_inputs, validation_labels);
    report.validation_accuracy.push_back(acc);
    if (acc > best_accuracy) {
      best_accuracy = acc;
      best = model;
      report.best_epoch = static_cast<std::size_t>(epoch);
    }
  }
  return TrainResult{std::move(best), std::move(report)};
}

std::vector<ScoredClass> top_k(std::span<const double> probabilities, std::size_t k) {
  if (k < 1 || k > probabilities.size()) {
    throw BadK("k = " + std::to_string(k) + " outside [1, " + std::to_string(probabilities.size()) + "]");
  }
  std::vector<std::size_t> order(probabilities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probabilities[a] > probabilities[b]; });
  std::vector<ScoredClass> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({order[i], probabilities[order[i]]});
  return out;
}

void write_classifier(std::ostream& out, const SoftmaxClassifier& classifier, const TrainConfig& config) {
  detail::json j;
  j["format"] = "hsc.softmax_classifier";
  j["version"] = 1;
  j["input_dimension"] = classifier.input_dimension();
  j["class_count"] = classifier.class_count();
  j["labels"] = classifier.labels();
  j["weights"] = std::vector<double>(classifier.weights().begin(), classifier.weights().end());
  j["bias"] = std::vector<double>(classifier.bias().begin(), classifier.bias().end());
  j["train_config"] = {{"epochs", config.epochs},
                       {"learning_rate", config.learning_rate},
                       {"batch_size", config.batch_size},
                       {"seed", config.seed},
                       {"l2_penalty", config.l2_penalty}};
  out << j.dump() << '\n';
}

ClassifierCheckpoint read_classifier(std::istream& in, const std::string& source_name) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto j = detail::parse_json(buffer.str(), source_name);
  using detail::get_field;
  if (get_field<std::string>(j, "format", source_name) != "hsc.softmax_classifier") {
    throw ParseError(source_name + ": not a classifier checkpoint");
  }
  const auto d = get_field<std::size_t>(j, "input_dimension", source_name);
  const auto c = get_field<std::size_t>(j, "class_count", source_name);
  auto labels = get_field<std::vector<std::string>>(j, "labels", source_name);
  if (labels.size() != c) throw ParseError(source_name + ": label count differs from class_count");
  const auto& tc = j.at("train_config");
  TrainConfig config;
  config.epochs = get_field<int>(tc, "epochs", source_name);
  config.learning_rate = get_field<double>(tc, "learning_rate", source_name);
  config.batch_size = get_field<int>(tc, "batch_size", source_name);
  config.seed = get_field<std::uint64_t>(tc, "seed", source_name);
  config.l2_penalty = get_field<double>(tc, "l2_penalty", source_name);
  try {
    return ClassifierCheckpoint{
        SoftmaxClassifier(d, std::move(labels), get_field<std::vector<double>>(j, "weights", source_name),
                          get_field<std::vector<double>>(j, "bias", source_name)),
        config};
  } catch (const DimensionMismatch& e) {
    throw ParseError(source_name + ": " + e.what());
  }
}

}  // namespace hsc
