#include "hsc/calibration.hpp"

#include <cmath>
#include <string>

#include "hsc/classifier.hpp"
#include "hsc/error.hpp"

namespace hsc {

namespace {

void check_temperature(double t) {
  if (!std::isfinite(t) || !(t > 0.0)) throw BadTemperature("temperature must be finite and positive");
}

}  // namespace

std::vector<double> scale(std::span<const double> logits, double temperature) {
  check_temperature(temperature);
  std::vector<double> z(logits.begin(), logits.end());
  for (auto& v : z) v /= temperature;
  return softmax(z);
}

TemperatureScaler::TemperatureScaler(double temperature) : temperature_(temperature) {
  check_temperature(temperature);
}

double mean_nll(std::span<const std::vector<double>> logits, std::span<const std::size_t> labels,
                double temperature) {
  if (logits.empty()) throw EmptyInput("mean_nll over an empty set");
  if (logits.size() != labels.size()) throw DimensionMismatch("logits and labels differ in length");
  for (const auto& z : logits) {
    if (z.size() != logits.front().size()) throw DimensionMismatch("logit vectors differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += cross_entropy(labels[i], scale(logits[i], temperature));
  return total / static_cast<double>(logits.size());
}

TemperatureScaler fit_temperature(std::span<const std::vector<double>> logits, std::span<const std::size_t> labels) {
  if (logits.empty()) throw EmptyInput("cannot fit a temperature on zero examples");
  if (logits.size() != labels.size()) throw DimensionMismatch("logits and labels differ in length");
  auto loss = [&](double log_t) { return mean_nll(logits, labels, std::exp(log_t)); };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(TemperatureScaler::kMinTemperature);
  double hi = std::log(TemperatureScaler::kMaxTemperature);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = loss(x1);
  double f2 = loss(x2);
  while (hi - lo > 1e-4) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = loss(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = loss(x2);
    }
  }

  double best_t = std::exp(0.5 * (lo + hi));
  double best_f = loss(std::log(best_t));
  for (double candidate : {1.0, TemperatureScaler::kMinTemperature, TemperatureScaler::kMaxTemperature}) {
    const double f = mean_nll(logits, labels, candidate);
    if (f < best_f) {
      best_f = f;
      best_t = candidate;
    }
  }
  return TemperatureScaler(best_t);
}

}  // namespace hsc
