#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsc {

/// softmax(logits / T). Throws BadTemperature unless T is finite and > 0.
std::vector<double> scale(std::span<const double> logits, double temperature);

class TemperatureScaler {
 public:
  static constexpr double kMinTemperature = 0.05;
  static constexpr double kMaxTemperature = 20.0;

  TemperatureScaler() = default;
  /// Throws BadTemperature.
  explicit TemperatureScaler(double temperature);

  double temperature() const noexcept { return temperature_; }
  std::vector<double> operator()(std::span<const double> logits) const { return scale(logits, temperature_); }

  friend bool operator==(const TemperatureScaler&, const TemperatureScaler&) = default;

 private:
  double temperature_ = 1.0;
};

/// Mean −ln softmax(z/T)[y] over the set.
double mean_nll(std::span<const std::vector<double>> logits, std::span<const std::size_t> labels,
                double temperature);

/// Golden-section search on ln T over [ln 0.05, ln 20] (tolerance 1e-4 in
/// ln T). The result is never worse than T = 1 or either bound.
/// Throws EmptyInput, DimensionMismatch, IndexOutOfRange.
TemperatureScaler fit_temperature(std::span<const std::vector<double>> logits, std::span<const std::size_t> labels);

}  // namespace hsc
