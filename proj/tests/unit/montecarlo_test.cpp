#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cellassoc/montecarlo.hpp"

namespace cellassoc {
namespace {

using std::numbers::pi;

TechnologyConfig reference(double beta = 1.0) {
  TechnologyConfig c;
  c.lambda = 1.0 / pi;
  c.beta = beta;
  return c;
}

MonteCarloSpec spec_of(std::size_t n, std::uint64_t seed = 1, std::size_t workers = 1) {
  MonteCarloSpec s;
  s.n_worlds = n;
  s.sampler.seed = seed;
  s.workers = workers;
  return s;
}

bool same(const PerformanceEstimate& a, const PerformanceEstimate& b) {
  return a.value == b.value && a.standard_error == b.standard_error && a.ci_low == b.ci_low &&
         a.ci_high == b.ci_high && a.n_samples == b.n_samples;
}

TEST(Estimate, NearestSingleTechnologyBracketsClosedForm) {
  const auto e = estimate(Policy::parse("nearest"), Metric::coverage, replicate(reference(), 1),
                          spec_of(1000000));
  EXPECT_TRUE(e.brackets(1.0 / (1.0 + pi / 4))) << e.value;
  EXPECT_NEAR(e.half_width_95, 0.001, 0.0002);
  EXPECT_EQ(e.n_samples, 1000000u);
  EXPECT_EQ(e.method, Method::monte_carlo);
}

TEST(Estimate, TinyThresholdCoversEverything) {
  const auto e = estimate(Policy::parse("max-ratio"), Metric::coverage,
                          replicate(reference(1e-30), 3), spec_of(1000));
  EXPECT_EQ(e.value, 1.0);
}

TEST(Estimate, FixedSeedIsBitIdentical) {
  const auto cs = replicate(reference(), 3);
  const auto p = Policy::parse("opt-cov:k=2");
  EXPECT_TRUE(same(estimate(p, Metric::coverage, cs, spec_of(20000, 9)),
                   estimate(p, Metric::coverage, cs, spec_of(20000, 9))));
  EXPECT_FALSE(same(estimate(p, Metric::coverage, cs, spec_of(20000, 9)),
                    estimate(p, Metric::coverage, cs, spec_of(20000, 10))));
}

TEST(Estimate, IndependentOfWorkerCount) {
  const auto cs = replicate(reference(), 2);
  std::vector<Arm> arms{{Policy::parse("random"), Metric::coverage, cs},
                        {Policy::parse("max-ratio"), Metric::rate, cs}};
  auto s1 = spec_of(30000, 4, 1);
  auto s3 = spec_of(30000, 4, 3);
  s1.block_size = s3.block_size = 1000;
  const auto a = estimate_batch(arms, s1);
  const auto b = estimate_batch(arms, s3);
  for (std::size_t i = 0; i < arms.size(); ++i) EXPECT_TRUE(same(a[i], b[i]));
  EXPECT_EQ(a.difference_standard_error(0, 1), b.difference_standard_error(0, 1));
}

TEST(Estimate, NoisyMaxRatioMatchesGeneralForm) {
  auto c = reference();
  c.noise = 0.1;
  const auto cs = replicate(c, 1);
  const auto e = estimate(Policy::parse("max-ratio"), Metric::coverage, cs, spec_of(200000));
  EXPECT_NEAR(e.value, analytic::cp_max_ratio_general(cs), 3 * e.standard_error);
}

TEST(Estimate, MaxRatioRateAtEightTechnologies) {
  const auto cs = replicate(reference(), 8);
  const auto e = estimate(Policy::parse("max-ratio"), Metric::rate, cs, spec_of(200000));
  EXPECT_NEAR(e.value, 6.0258752573830593661, 3 * e.standard_error);
  EXPECT_NEAR(e.ci_high - e.value, e.half_width_95, 1e-12);
}

TEST(Estimate, OptimalThreeDistancePolicyNearClosedFormBound) {
  // Three distances can only help over two (information ordering).
  const auto cs = replicate(reference(), 5);
  std::vector<Arm> arms{{Policy::parse("opt-cov:k=2"), Metric::coverage, cs},
                        {Policy::parse("opt-cov:k=3"), Metric::coverage, cs}};
  const auto b = estimate_batch(arms, spec_of(100000));
  EXPECT_NEAR(b[0].value, 0.902780687379, 3 * b[0].standard_error);
  EXPECT_GT(b.difference(1, 0), -2 * b.difference_standard_error(1, 0));
}

TEST(Estimate, TruncationBiasBelowNoise) {
  const auto cs = replicate(reference(), 2);
  auto s64 = spec_of(200000, 3);
  auto s128 = spec_of(200000, 4);
  s128.sampler.bs_count = 128;
  const auto p = Policy::parse("max-ratio");
  const auto a = estimate(p, Metric::coverage, cs, s64);
  const auto b = estimate(p, Metric::coverage, cs, s128);
  EXPECT_LT(std::abs(a.value - b.value), 3 * std::hypot(a.standard_error, b.standard_error));
}

TEST(Estimate, AnalyticValueInsideCiForMostSeeds) {
  const auto cs = replicate(reference(), 2);
  const double exact = 0.72255334636358524564;
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    inside += estimate(Policy::parse("max-ratio"), Metric::coverage, cs, spec_of(5000, seed))
                      .brackets(exact)
                  ? 1
                  : 0;
  }
  EXPECT_GE(inside, 45);
}

TEST(Estimate, RejectsBadSpecs) {
  const auto cs = replicate(reference(), 2);
  EXPECT_THROW(estimate(Policy::parse("nearest"), Metric::coverage, cs, spec_of(99)),
               ArgumentError);
  auto shallow = spec_of(1000);
  shallow.sampler.bs_count = 2;
  EXPECT_THROW(estimate(Policy::parse("opt-cov:k=3"), Metric::coverage, cs, shallow),
               ArgumentError);
}

TEST(EstimateBatch, ArmsMustShareDensity) {
  auto other = reference();
  other.lambda *= 2;
  std::vector<Arm> arms{{Policy::parse("nearest"), Metric::coverage, replicate(reference(), 2)},
                        {Policy::parse("nearest"), Metric::coverage, replicate(other, 2)}};
  EXPECT_THROW(estimate_batch(arms, spec_of(1000)), ArgumentError);
}

TEST(EstimateBatch, PrefixArmsSeeSameWorlds) {
  // An arm with T = 1 observes technology 1 of the shared worlds, so nearest and
  // max-ratio coincide on it exactly.
  std::vector<Arm> arms{{Policy::parse("nearest"), Metric::coverage, replicate(reference(), 1)},
                        {Policy::parse("max-ratio"), Metric::coverage, replicate(reference(), 1)},
                        {Policy::parse("max-ratio"), Metric::coverage, replicate(reference(), 4)}};
  const auto b = estimate_batch(arms, spec_of(20000));
  EXPECT_EQ(b[0].value, b[1].value);
  EXPECT_EQ(b.difference_standard_error(0, 1), 0.0);
  EXPECT_GT(b[2].value, b[0].value);
}

TEST(EstimateBatch, PairedErrorMatchesPerWorldDifferences) {
  const auto cs = replicate(reference(), 3);
  std::vector<Arm> arms{{Policy::parse("nearest"), Metric::coverage, cs},
                        {Policy::parse("max-ratio"), Metric::coverage, cs}};
  const auto b = estimate_batch(arms, spec_of(50000));
  EXPECT_NEAR(b.difference(1, 0), b[1].value - b[0].value, 1e-12);
  // Common worlds make the paired error smaller than the unpaired one.
  EXPECT_LT(b.difference_standard_error(1, 0), std::hypot(b[0].standard_error, b[1].standard_error));
}

TEST(EstimateBatch, ContrastGeneralizesDifference) {
  const auto cs = replicate(reference(), 3);
  std::vector<Arm> arms{{Policy::parse("nearest"), Metric::coverage, cs},
                        {Policy::parse("max-ratio"), Metric::coverage, cs},
                        {Policy::parse("random"), Metric::coverage, cs}};
  const auto b = estimate_batch(arms, spec_of(20000));
  const std::pair<std::size_t, double> two[] = {{1, 1.0}, {0, -1.0}};
  EXPECT_NEAR(b.contrast(two).value, b.difference(1, 0), 1e-15);
  EXPECT_NEAR(b.contrast(two).standard_error, b.difference_standard_error(1, 0), 1e-15);
  const std::pair<std::size_t, double> one[] = {{2, 1.0}};
  EXPECT_NEAR(b.contrast(one).value, b[2].value, 1e-12);
  EXPECT_NEAR(b.contrast(one).standard_error, b[2].standard_error, 1e-4 * b[2].standard_error);
  const std::pair<std::size_t, double> none[] = {{0, 1.0}, {1, 1.0}, {0, -1.0}, {1, -1.0}};
  EXPECT_NEAR(b.contrast(none).value, 0.0, 1e-15);
  EXPECT_NEAR(b.contrast(none).standard_error, 0.0, 1e-9);
}

TEST(Agreement, PolicyWithItselfIsOne) {
  const auto cs = replicate(reference(), 3);
  const auto p = Policy::parse("max-ratio");
  EXPECT_EQ(agreement_rate(p, p, cs, spec_of(1000)).rate, 1.0);
}

TEST(Agreement, NearestAndSingleDistanceOptimal) {
  const auto cs = replicate(reference(), 3);
  EXPECT_EQ(agreement_rate(Policy::parse("nearest"), Policy::parse("opt-cov:k=1"), cs,
                           spec_of(10000))
                .rate,
            1.0);
}

TEST(Agreement, MaxRatioConvergesWithPathLoss) {
  // Reference rates from a vectorized oracle over 2e6 worlds (tests/oracles).
  const std::map<double, double> oracle{{4.0, 0.8838955}, {10.0, 0.9743435}};
  std::vector<double> rates;
  for (double alpha : {3.0, 4.0, 6.0, 8.0, 10.0}) {
    auto c = reference();
    c.alpha = alpha;
    const auto a = agreement_rate(Policy::parse("max-ratio"), Policy::parse("opt-cov:k=2"),
                                  replicate(c, 2), spec_of(100000));
    if (oracle.contains(alpha)) {
      const double se = std::sqrt(a.rate * (1.0 - a.rate) / 100000.0);
      EXPECT_NEAR(a.rate, oracle.at(alpha), 3.0 * se + 3.0 * 0.0002) << alpha;
    }
    rates.push_back(a.rate);
  }
  for (std::size_t i = 1; i < rates.size(); ++i) EXPECT_GT(rates[i], rates[i - 1]);
}

TEST(KsStatistic, SamplesFromTheCdf) {
  RandomStream rng(2);
  std::vector<double> s(100000);
  for (auto& x : s) x = rng.exponential(2.0);
  EXPECT_LT(ks_statistic(s, [](double x) { return 1.0 - std::exp(-2.0 * x); }), 0.01);
}

TEST(KsStatistic, DegenerateSample) {
  const std::vector<double> s(1000, 0.3);
  const auto F = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_NEAR(ks_statistic(s, F), 0.7, 1e-12);
  EXPECT_THROW(ks_statistic({}, F), ArgumentError);
}

TEST(Intervals, Wilson) {
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
  const auto [lo0, hi0] = wilson_interval(0, 100);
  EXPECT_NEAR(lo0, 0.0, 1e-15);
  EXPECT_GT(hi0, 0.0);
}

TEST(Intervals, StudentT) {
  // Samples 1..10: mean 5.5, sd 3.02765, t_{0.975, 9} = 2.262157.
  double sum = 0, sq = 0;
  for (int i = 1; i <= 10; ++i) {
    sum += i;
    sq += i * i;
  }
  const auto [mean, half] = t_interval(sum, sq, 10);
  EXPECT_DOUBLE_EQ(mean, 5.5);
  EXPECT_NEAR(half, 2.262157 * 3.0276504 / std::sqrt(10.0), 1e-5);
  EXPECT_THROW(t_interval(1, 1, 1), ArgumentError);
}

TEST(AnalyticEstimate, HasNoInterval) {
  const auto e = analytic_estimate(0.7, Metric::coverage);
  EXPECT_EQ(e.value, 0.7);
  EXPECT_EQ(e.half_width_95, 0.0);
  EXPECT_EQ(e.method, Method::analytic);
  EXPECT_EQ(to_string(Method::analytic), "analytic");
  EXPECT_EQ(to_string(Method::monte_carlo), "monte-carlo");
}

}  // namespace
}  // namespace cellassoc
