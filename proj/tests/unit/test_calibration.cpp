#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hsc/calibration.hpp"
#include "hsc/classifier.hpp"
#include "hsc/error.hpp"
#include "oracles.hpp"

using namespace hsc;

namespace {

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Reference NLL by log-sum-exp, independent of the library.
double reference_nll(const oracle::CalibrationSample& s, double t) {
  long double total = 0;
  for (std::size_t i = 0; i < s.logits.size(); ++i) {
    const auto& z = s.logits[i];
    const double peak = *std::max_element(z.begin(), z.end()) / t;
    long double sum = 0;
    for (double v : z) sum += std::exp(v / t - peak);
    total += -(z[s.labels[i]] / t - peak - std::log(sum));
  }
  return static_cast<double>(total / s.logits.size());
}

}  // namespace

TEST(Scale, UnitTemperatureIsSoftmax) {
  const std::vector<double> z = {0.3, -1.2, 2.5};
  EXPECT_EQ(scale(z, 1.0), softmax(z));
}

TEST(Scale, LargeTemperatureIsUniform) {
  const std::vector<double> z = {5, -3, 0, 1};
  for (double p : scale(z, 1e6)) EXPECT_NEAR(p, 0.25, 1e-4);
}

TEST(Scale, HalvedLogits) {
  const auto p = scale(std::vector<double>{2, 0}, 2.0);
  EXPECT_NEAR(p[0], 0.7311, 1e-4);
  EXPECT_NEAR(p[1], 0.2689, 1e-4);
}

TEST(Scale, BadTemperature) {
  const std::vector<double> z = {1, 2};
  for (double t : {0.0, -1.0, std::numeric_limits<double>::infinity(), std::nan("")}) {
    EXPECT_THROW(scale(z, t), BadTemperature) << t;
    EXPECT_THROW(TemperatureScaler{t}, BadTemperature) << t;
  }
}

TEST(Scale, ArgmaxAndSimplexProperty) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 5.0);
  std::uniform_real_distribution<double> logt(std::log(0.01), std::log(100.0));
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> z(2 + rng() % 6);
    for (auto& v : z) v = std::round(normal(rng));  // rounding creates exact ties
    const double t = std::exp(logt(rng));
    const auto p = scale(z, t);
    double sum = 0;
    for (double v : p) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-9);
    const double zmax = *std::max_element(z.begin(), z.end());
    const double pmax = *std::max_element(p.begin(), p.end());
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(z[i] == zmax, p[i] == pmax) << trial;
    EXPECT_EQ(argmax(p), argmax(z));
  }
}

TEST(FitTemperature, CalibratedSample) {
  const auto sample = oracle::calibrated_logits(10000, 5, 2.0, 31);
  const auto t = fit_temperature(sample.logits, sample.labels).temperature();
  EXPECT_GE(t, 0.8);
  EXPECT_LE(t, 1.25);
}

TEST(FitTemperature, ScaledSample) {
  auto sample = oracle::calibrated_logits(10000, 5, 2.0, 32);
  for (auto& z : sample.logits) {
    for (auto& v : z) v *= 3.0;
  }
  const auto t = fit_temperature(sample.logits, sample.labels).temperature();
  EXPECT_GE(t, 2.4);
  EXPECT_LE(t, 3.75);
  EXPECT_LE(reference_nll(sample, t), reference_nll(sample, 1.0));
}

TEST(FitTemperature, SingleCorrectExampleHitsLowerBound) {
  const std::vector<std::vector<double>> z = {{2.0, 0.5, -1.0}};
  const std::vector<std::size_t> y = {0};
  EXPECT_DOUBLE_EQ(fit_temperature(z, y).temperature(), TemperatureScaler::kMinTemperature);
}

TEST(FitTemperature, SingleWrongExampleHitsUpperBound) {
  const std::vector<std::vector<double>> z = {{2.0, 0.5, -1.0}};
  const std::vector<std::size_t> y = {2};
  EXPECT_DOUBLE_EQ(fit_temperature(z, y).temperature(), TemperatureScaler::kMaxTemperature);
}

TEST(FitTemperature, NeverWorseThanUnitProperty) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sample = oracle::calibrated_logits(1 + rng() % 60, 2 + rng() % 4, 0.5 + (rng() % 8), rng());
    const double t = fit_temperature(sample.logits, sample.labels).temperature();
    EXPECT_GE(t, TemperatureScaler::kMinTemperature);
    EXPECT_LE(t, TemperatureScaler::kMaxTemperature);
    EXPECT_LE(reference_nll(sample, t), reference_nll(sample, 1.0) + 1e-12);
    EXPECT_NEAR(mean_nll(sample.logits, sample.labels, t), reference_nll(sample, t), 1e-12);
  }
}

TEST(FitTemperature, MatchesGridSearch) {
  const auto sample = oracle::calibrated_logits(500, 4, 1.5, 77);
  const double t = fit_temperature(sample.logits, sample.labels).temperature();
  double best_t = 1.0, best = std::numeric_limits<double>::infinity();
  for (double lt = std::log(0.05); lt <= std::log(20.0); lt += 1e-3) {
    const double nll = reference_nll(sample, std::exp(lt));
    if (nll < best) {
      best = nll;
      best_t = std::exp(lt);
    }
  }
  EXPECT_NEAR(std::log(t), std::log(best_t), 2e-3);
}

TEST(FitTemperature, Errors) {
  EXPECT_THROW(fit_temperature({}, {}), EmptyInput);
  const std::vector<std::vector<double>> z = {{1.0, 2.0}, {1.0}};
  EXPECT_THROW(fit_temperature(z, std::vector<std::size_t>{0, 0}), DimensionMismatch);
  const std::vector<std::vector<double>> ok = {{1.0, 2.0}};
  EXPECT_THROW(fit_temperature(ok, std::vector<std::size_t>{2}), IndexOutOfRange);
}
