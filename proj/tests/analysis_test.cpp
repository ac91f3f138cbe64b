#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "undulate/analysis.hpp"
#include "undulate/optimize.hpp"

namespace undulate {
namespace {

std::vector<double> randomPositive(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

TEST(PerformanceRatiosTest, Examples) {
  const SquareMatrix equal = performanceRatios(std::vector<double>{2, 2});
  for (double v : equal.data) EXPECT_EQ(v, 1.0);
  const SquareMatrix d = performanceRatios(std::vector<double>{4, 2});
  EXPECT_EQ(d(0, 0), 1.0);
  EXPECT_EQ(d(0, 1), 2.0);
  EXPECT_EQ(d(1, 0), 0.5);
  EXPECT_EQ(d(1, 1), 1.0);
}

TEST(PerformanceRatiosTest, ReciprocalAndUnitDiagonal) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const SquareMatrix d = performanceRatios(ClassDisplacements{DataClass::Exp, randomPositive(rng, 6)});
    for (std::size_t i = 0; i < d.n; ++i) {
      EXPECT_EQ(d(i, i), 1.0);
      for (std::size_t j = 0; j < d.n; ++j) EXPECT_NEAR(d(i, j) * d(j, i), 1.0, 1e-14);
    }
  }
}

TEST(PerformanceRatiosTest, RejectsNonPositive) {
  try {
    performanceRatios(std::vector<double>{1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDisplacement);
  }
  EXPECT_THROW(performanceRatios(std::vector<double>{1.0, -2.0}), Error);
}

TEST(RatioQuotientsTest, IdenticalClasses) {
  std::mt19937_64 rng(73);
  const SquareMatrix d = performanceRatios(randomPositive(rng, 5));
  const QuotientResult q = ratioQuotients(d, d);
  for (double v : q.xi.data) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(q.offDiagonal.mean, 1.0);
  EXPECT_EQ(q.offDiagonal.std, 0.0);
}

TEST(RatioQuotientsTest, MatchesDirectDivision) {
  std::mt19937_64 rng(79);
  const auto x = randomPositive(rng, 3), y = randomPositive(rng, 3);
  const QuotientResult q = ratioQuotients(performanceRatios(x), performanceRatios(y));
  std::vector<double> off;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double expected = (x[i] / x[j]) / (y[i] / y[j]);
      EXPECT_NEAR(q.xi(i, j), expected, 1e-14);
      if (i != j) off.push_back(expected);
    }
  double mean = 0.0;
  for (double v : off) mean += v;
  mean /= 6.0;
  double var = 0.0;
  for (double v : off) var += (v - mean) * (v - mean);
  EXPECT_NEAR(q.offDiagonal.mean, mean, 1e-14);
  EXPECT_NEAR(q.offDiagonal.std, std::sqrt(var / 6.0), 1e-14);
  EXPECT_NEAR(ratioQuotients(performanceRatios(x), performanceRatios(y), StdKind::Sample).offDiagonal.std,
              std::sqrt(var / 5.0), 1e-14);
}

TEST(RatioQuotientsTest, SwappingClassesInverts) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const SquareMatrix dx = performanceRatios(randomPositive(rng, 4));
    const SquareMatrix dy = performanceRatios(randomPositive(rng, 4));
    const QuotientResult a = ratioQuotients(dx, dy), b = ratioQuotients(dy, dx);
    for (std::size_t i = 0; i < a.xi.data.size(); ++i) EXPECT_NEAR(a.xi.data[i], 1.0 / b.xi.data[i], 1e-12);
  }
}

TEST(RatioQuotientsTest, DimensionMismatch) {
  try {
    ratioQuotients(SquareMatrix(2, 1.0), SquareMatrix(3, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(TrialStatsTest, Examples) {
  const Summary a = trialStats(std::vector<double>{1, 1, 1});
  EXPECT_EQ(a.mean, 1.0);
  EXPECT_EQ(a.std, 0.0);
  const Summary b = trialStats(std::vector<double>{0, 2});
  EXPECT_EQ(b.mean, 1.0);
  EXPECT_EQ(b.std, 1.0);
  EXPECT_NEAR(trialStats(std::vector<double>{0, 2}, StdKind::Sample).std, std::sqrt(2.0), 1e-15);
  EXPECT_THROW(trialStats(std::vector<double>{}), Error);
}

TEST(TrialStatsTest, MatchesTwoPassComputation) {
  std::mt19937_64 rng(89);
  std::normal_distribution<double> u(3.0, 2.0);
  std::vector<double> v(257);
  for (auto& x : v) x = u(rng);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const Summary s = trialStats(v);
  EXPECT_NEAR(s.mean, mean, 1e-12);
  EXPECT_NEAR(s.std, std::sqrt(var / static_cast<double>(v.size())), 1e-12);
}

TEST(CostOfTransportTest, Examples) {
  EXPECT_NEAR(costOfTransport(1.38 * 9.81 * 0.1, 1.38, 9.81, 0.1), 1.0, 1e-15);
  EXPECT_NEAR(costOfTransport(10, 1.38, 9.81, 0.1), 2 * costOfTransport(5, 1.38, 9.81, 0.1), 1e-14);
  EXPECT_NEAR(costOfTransport(5, 1.38, 9.81, 0.1), 3.693, 5e-4);
  EXPECT_NEAR(costOfTransport(5, 1.38, 9.81, 0.1), 5.0 / (1.38 * 9.81 * 0.1), 1e-15);
  EXPECT_NEAR(costOfTransport(7.5, 1.38, 9.81, 0.3), costOfTransport(2.5, 1.38, 9.81, 0.1), 1e-14);
  EXPECT_THROW(costOfTransport(0, 1, 1, 1), Error);
  EXPECT_THROW(costOfTransport(1, 1, 1, -1), Error);
}

TEST(PowerProxyTest, StationaryAndScaling) {
  SimConfig sim;
  const auto params = DissipationParams::uniform(12, 1.38, 0.1865);
  EXPECT_EQ(simulatedPowerProxy(simulateGait({1, 0, 0, 0, 0.0, 1}, sim, params), 10.0), 0.0);
  const Trajectory traj = simulateGait({1, 0, 0, 0, 5.0, 1}, sim, params);
  EXPECT_NEAR(simulatedPowerProxy(traj, 20.0), 0.5 * simulatedPowerProxy(traj, 10.0), 1e-18);
  EXPECT_EQ(simulatedPowerProxy(traj, 1.0), totalEnergy(traj));
  try {
    simulatedPowerProxy(traj, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDuration);
  }
}

TEST(PowerProxyTest, ProxyCostOfTransportFallsWithPenalty) {
  const GaitBounds bounds;
  const GaitEllipse seed = randomGait(1, bounds);
  auto proxyCot = [&](double c) {
    ObjectiveConfig cfg;
    cfg.dissipationCoefficient = c;
    cfg.params = DissipationParams::uniform(12, 1.38, 0.1865);
    const GaitEllipse g = optimizeGait(seed, bounds, cfg).gait;
    const Trajectory traj = simulateGait(g, cfg.sim, cfg.params);
    return costOfTransport(simulatedPowerProxy(traj, 10.0), 1.38, 9.81,
                           activeVelocity(comDisplacement(traj), 10.0));
  };
  EXPECT_LE(proxyCot(2.5), proxyCot(0.0));
}

TEST(PowerLogTest, MeanAndValidation) {
  const PowerLog log{{0, 1, 3}, {2, 4, 4}};
  EXPECT_NO_THROW(log.validate());
  EXPECT_NEAR(log.mean(), (3.0 + 8.0) / 3.0, 1e-15);
  EXPECT_EQ((PowerLog{{0}, {5}}.mean()), 5.0);
  EXPECT_THROW((PowerLog{{0, 1}, {1, -1}}.validate()), Error);
  EXPECT_THROW((PowerLog{{0, 0}, {1, 1}}.validate()), Error);
  EXPECT_THROW((PowerLog{{0, 1}, {1}}.validate()), Error);
}

TEST(ActiveVelocityTest, ExcludesPauses) {
  EXPECT_EQ(activeVelocity(1.5, 30.0), 0.05);
  EXPECT_THROW(activeVelocity(1.0, 0.0), Error);
}

}  // namespace
}  // namespace undulate
