#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cellassoc/policies.hpp"
#include "cellassoc/sampling.hpp"
#include "cellassoc/types.hpp"

namespace cellassoc {

enum class Method { monte_carlo, analytic };
std::string to_string(Method m);

struct PerformanceEstimate {
  double value = 0.0;
  double half_width_95 = 0.0;  ///< 0 for analytic values
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_samples = 0;
  Method method = Method::monte_carlo;
  Metric metric = Metric::coverage;

  bool brackets(double x) const { return ci_low <= x && x <= ci_high; }
};

PerformanceEstimate analytic_estimate(double value, Metric metric);

/// One (policy, metric, technologies) combination evaluated on shared worlds.
struct Arm {
  Policy policy;
  Metric metric = Metric::coverage;
  std::vector<TechnologyConfig> configs;
};

struct MonteCarloSpec {
  std::size_t n_worlds = 10000;
  SamplerSpec sampler;
  std::size_t workers = 1;
  std::size_t block_size = 4096;  ///< worlds per RNG block

  void validate() const;
};

/// Estimates for a batch of arms, plus paired statistics between arms.
class BatchResult {
 public:
  BatchResult(std::vector<PerformanceEstimate> estimates, std::vector<double> sums,
              std::vector<double> cross, std::size_t n);

  const std::vector<PerformanceEstimate>& estimates() const { return estimates_; }
  const PerformanceEstimate& operator[](std::size_t arm) const { return estimates_.at(arm); }
  std::size_t size() const { return estimates_.size(); }

  /// Mean of (arm a - arm b) over the shared worlds.
  double difference(std::size_t a, std::size_t b) const;
  /// Standard error of that mean, from the paired per-world differences.
  double difference_standard_error(std::size_t a, std::size_t b) const;

  /// Mean of sum_i w_i * arm_i over the shared worlds, with its paired standard error.
  struct Contrast {
    double value = 0.0;
    double standard_error = 0.0;
  };
  Contrast contrast(std::span<const std::pair<std::size_t, double>> terms) const;

 private:
  double cross(std::size_t a, std::size_t b) const;

  std::vector<PerformanceEstimate> estimates_;
  std::vector<double> sums_;
  std::vector<double> cross_;  // packed upper triangle of sum x_a x_b
  std::size_t n_;
};

/// Monte Carlo estimates of every arm on one common sequence of worlds. Arms may
/// use different T (technology i is shared by all arms with T >= i) and different
/// alpha, beta, power, noise or bandwidth, but each shared technology must have the
/// same density and fading law in every arm. World w of block b depends only on
/// (seed, b, w), so results do not depend on the worker count.
BatchResult estimate_batch(std::span<const Arm> arms, const MonteCarloSpec& spec);

PerformanceEstimate estimate(const Policy& policy, Metric metric,
                             std::span<const TechnologyConfig> configs, const MonteCarloSpec& spec);

struct AgreementEstimate {
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_samples = 0;
};

/// Fraction of sampled worlds on which both policies pick the same technology.
AgreementEstimate agreement_rate(const Policy& a, const Policy& b,
                                 std::span<const TechnologyConfig> configs,
                                 const MonteCarloSpec& spec);

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double z = 1.959963984540054);

/// Mean and t-interval half-width of a sample described by its sums.
std::pair<double, double> t_interval(double sum, double sum_sq, std::size_t n,
                                     double confidence = 0.95);

}  // namespace cellassoc
