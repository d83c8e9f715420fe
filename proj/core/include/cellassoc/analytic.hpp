#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cellassoc/interference.hpp"
#include "cellassoc/quadrature.hpp"
#include "cellassoc/types.hpp"

// Closed-form and integral performance expressions for Rayleigh fading and
// power-law path loss. Every value is produced by quadrature; the interference
// tails go through the shared G_alpha table (see interference.hpp).
namespace cellassoc::analytic {

/// Coverage probability of the nearest base station conditioned on the k nearest
/// distances of its technology:
///
///   e^{-mu beta N0 r1^alpha / P} * prod_{m=2..k} 1 / (1 + beta (r1/r_m)^alpha)
///     * exp(-2 pi lambda \int_{r_k}^\infty u / (1 + beta^-1 (u/r1)^alpha) du)
///
/// Bound to one technology so that repeated evaluation skips the table lookup.
class ConditionalCoverage {
 public:
  explicit ConditionalCoverage(const TechnologyConfig& cfg);

  const TechnologyConfig& config() const { return cfg_; }

  /// At the configured threshold.
  double operator()(std::span<const double> distances) const {
    return at_threshold(distances, cfg_.beta);
  }
  double at_threshold(std::span<const double> distances, double beta) const;

  /// B * E[log2(1 + SINR) | distances] = B * \int_0^\infty cp(2^t - 1) dt.
  double rate(std::span<const double> distances, const QuadratureSpec& spec = {}) const;

 private:
  TechnologyConfig cfg_;
  const TabulatedTail* tail_;
};

double cp_given_r1(double r1, const TechnologyConfig& cfg);
double cp_given_r1_r2(double r1, double r2, const TechnologyConfig& cfg);
double cp_given_k_distances(std::span<const double> r, const TechnologyConfig& cfg);

/// \int_0^\infty cp_kernel(2^t - 1) dt for a coverage kernel indexed by threshold.
double rate_from_coverage(const std::function<double(double)>& cp_kernel,
                          const QuadratureSpec& spec = {});

/// \int_1^\infty v / (1 + beta^-1 v^alpha) dv: the r1-normalized interference
/// exponent of the nearest-distance kernel.
double nearest_interference_exponent(double beta, double alpha);

/// CDF of the optimal single-distance coverage score cp_given_r1(r1) in the
/// interference-limited regime: y^{1 / (2 I)} with I = nearest_interference_exponent.
double cdf_opt_nearest(double y, double beta, double alpha);

/// CDF of r2/r1 for any homogeneous PPP: 1 - 1/x^2.
double cdf_max_ratio(double x);

/// CDF of the nearest policy's score -r1: P[-r1 <= y] = exp(-pi lambda y^2), y <= 0.
double cdf_nearest_score(double y, double lambda);

/// CDF of the two-distance coverage score cp_given_r1_r2 (interference-limited
/// regime only). With w = lambda pi r2^2 ~ Gamma(2) independent of t = r2/r1:
///   F(y) = \int_1^\infty 2 t^-3 P[w >= t^2 ln(h(t)/y) / (2 J(t))] dt,
/// h(t) = 1/(1 + beta t^-alpha), J(t) = \int_t^\infty v / (1 + beta^-1 v^alpha) dv.
double cdf_opt_coverage_2(double y, const TechnologyConfig& cfg, const QuadratureSpec& spec = {});

/// \int_{u >= y^{-2/alpha}} du / (1 + x^-alpha u^{alpha/2}).
double phi(double alpha, double y, double x, const QuadratureSpec& spec = {});

/// P[SIR >= beta | r2/r1 >= 1/x] = 1 / (1 + beta^{2/alpha} phi(alpha, beta, x)).
double sir_coverage_given_ratio_bound(double x, double beta, double alpha,
                                      const QuadratureSpec& spec = {});

/// Max-ratio coverage in the interference-limited regime with a shared exponent;
/// T = betas.size().
double cp_max_ratio_closed(std::span<const double> betas, double alpha,
                           const QuadratureSpec& spec = {});

/// Max-ratio average rate in the interference-limited regime (unit bandwidth).
double rate_max_ratio_closed(std::size_t technology_count, double alpha,
                             const QuadratureSpec& spec = {});

/// Coverage of one technology conditioned on r2/r1 = t (any noise level).
double cp_cond_ratio(double t, const TechnologyConfig& cfg, const QuadratureSpec& spec = {});

/// Max-ratio coverage for arbitrary technologies, noise included.
double cp_max_ratio_general(std::span<const TechnologyConfig> configs,
                            const QuadratureSpec& spec = {});

/// Max-ratio average rate for arbitrary technologies (weighted by bandwidth).
double rate_max_ratio_general(std::span<const TechnologyConfig> configs,
                              const QuadratureSpec& spec = {});

/// Coverage of the optimal policy that knows r1 of every technology. Requires
/// N0 = 0 (the score CDF is only distance-free without noise).
double cp_opt_nearest(std::span<const TechnologyConfig> configs, const QuadratureSpec& spec = {});

/// Ingredients of a generalized association policy for one technology:
/// i* = argmax_i score_i(r_i), with r_i an L-dimensional observation.
struct PolicyPieces {
  std::size_t dimension = 1;  ///< L; 1 or 2
  /// Integration range per observation coordinate.
  std::vector<std::pair<double, double>> domain;
  std::function<double(std::span<const double>)> density;      ///< f_i(r)
  std::function<double(std::span<const double>)> score;        ///< pi_i(r)
  std::function<double(double)> score_cdf;                     ///< F_{pi_i}(y)
  std::function<double(std::span<const double>)> performance;  ///< E[p_i(SINR) | r]
  /// Technologies with equal keys are treated as identically distributed, which
  /// lets the evaluator share work between them. nullopt means unique.
  std::optional<std::size_t> law_key;
};

/// sum_i \int E[p_i | r] f_i(r) prod_{j != i} F_{pi_j}(pi_i(r)) dr.
/// Throws ArgumentError for L > 2 or missing pieces.
double evaluate_policy_analytic(std::span<const PolicyPieces> pieces,
                                const QuadratureSpec& spec = {});

/// Joint density of (r1, r2/r1) for a PPP of intensity lambda:
/// (2 pi lambda)^2 u^3 v exp(-lambda pi (u v)^2).
double ratio_joint_density(double u, double v, double lambda);

/// Rayleigh density of r1: 2 pi lambda r exp(-pi lambda r^2).
double nearest_distance_density(double r, double lambda);

}  // namespace cellassoc::analytic
