#include "amm/price_path.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace amm;

TEST(Gbm, ZeroVolIsPureDrift) {
  auto p = sample_gbm(3000.0, {0.0, 0.1}, 10, 0.1, 1, 0);
  ASSERT_EQ(p.steps(), 10);
  EXPECT_DOUBLE_EQ(p.values[0], 3000.0);
  for (int i = 1; i <= 10; ++i)
    EXPECT_NEAR(p.values[i], 3000.0 * std::exp(0.1 * 0.1 * i), 1e-9);
}

TEST(Gbm, SeedAndPathIndexReproduce) {
  auto a = sample_gbm(3000.0, {0.04, 0.0}, 100, 1.0 / 1440, 99, 7);
  auto b = sample_gbm(3000.0, {0.04, 0.0}, 100, 1.0 / 1440, 99, 7);
  auto c = sample_gbm(3000.0, {0.04, 0.0}, 100, 1.0 / 1440, 99, 8);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(Gbm, DriftlessIsAMartingale) {
  const int m = 20000;
  double sum = 0.0;
  for (int i = 0; i < m; ++i)
    sum += sample_gbm(3000.0, {0.2, 0.0}, 16, 1.0 / 16, 31, uint64_t(i)).values.back();
  // se = s0 * sigma / sqrt(m) ~ 4.2
  EXPECT_NEAR(sum / m, 3000.0, 15.0);
}

TEST(Gbm, LogIncrementMoments) {
  const int n = 1440;
  auto p = sample_gbm(3000.0, {0.04, 0.0}, n, 1.0 / n, 4, 0);
  double mean = 0.0, var = 0.0;
  for (int i = 1; i <= n; ++i) mean += std::log(p.values[i] / p.values[i - 1]);
  mean /= n;
  for (int i = 1; i <= n; ++i) {
    double d = std::log(p.values[i] / p.values[i - 1]) - mean;
    var += d * d;
  }
  var /= (n - 1);
  double step_var = 0.04 * 0.04 / n;
  EXPECT_NEAR(var / step_var, 1.0, 0.12);  // chi^2 noise at n=1440
}

TEST(Gbm, RejectsBadArguments) {
  EXPECT_THROW(sample_gbm(-1.0, {0.1, 0.0}, 10, 0.1, 1, 0), std::invalid_argument);
  EXPECT_THROW(sample_gbm(3000.0, {-0.1, 0.0}, 10, 0.1, 1, 0), std::invalid_argument);
  EXPECT_THROW(sample_gbm(3000.0, {0.1, NAN}, 10, 0.1, 1, 0), std::invalid_argument);
  EXPECT_THROW(sample_gbm(3000.0, {0.1, 0.0}, 0, 0.1, 1, 0), std::invalid_argument);
  EXPECT_THROW(sample_gbm(3000.0, {0.1, 0.0}, 10, 0.0, 1, 0), std::invalid_argument);
}

TEST(ExpOu, RejectsUnstableEulerStep) {
  EXPECT_THROW(sample_exp_ou(3000.0, {1500.0, 8.0, 0.02}, 10, 1.0 / 1440, 1, 0),
               std::invalid_argument);
  EXPECT_NO_THROW(sample_exp_ou(3000.0, {100.0, 8.0, 0.02}, 10, 1.0 / 1440, 1, 0));
}

// With kappa = 0 the recursion is driftless in logs, i.e. GBM with
// mu = sigma^2 / 2.
TEST(ExpOu, ZeroReversionMatchesGbm) {
  double sigma = 0.05;
  auto ou = sample_exp_ou(3000.0, {0.0, 0.0, sigma}, 500, 1.0 / 1440, 77, 3);
  auto gbm = sample_gbm(3000.0, {sigma, 0.5 * sigma * sigma}, 500, 1.0 / 1440, 77, 3);
  for (size_t i = 0; i < ou.values.size(); ++i)
    EXPECT_NEAR(ou.values[i] / gbm.values[i], 1.0, 1e-9);
}

TEST(ExpOu, PullsTowardTheMean) {
  // Start far below the long-run level with strong reversion and tiny noise.
  double theta = std::log(3000.0);
  auto p = sample_exp_ou(1000.0, {500.0, theta, 0.001}, 1440, 1.0 / 1440, 5, 0);
  EXPECT_NEAR(std::log(p.values.back()), theta, 0.05);
}

TEST(PriceModel, DispatchesByAlternative) {
  PriceModel m = GbmParams{0.04, 0.0};
  auto a = make_path(m, 3000.0, 10, 0.1, 42, 0);
  auto b = sample_gbm(3000.0, {0.04, 0.0}, 10, 0.1, 42, 0);
  EXPECT_EQ(a.values, b.values);

  auto fixed = std::make_shared<PricePath>(b);
  PriceModel h = HistoricalSeries{fixed};
  auto c = make_path(h, 1.0, 10, 0.1, 0, 55);
  EXPECT_EQ(c.values, b.values);

  PriceModel empty = HistoricalSeries{};
  EXPECT_THROW(make_path(empty, 1.0, 10, 0.1, 0, 0), std::invalid_argument);
}
