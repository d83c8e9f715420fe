#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellassoc/analytic.hpp"
#include "cellassoc/quadrature.hpp"
#include "cellassoc/sampling.hpp"
#include "cellassoc/types.hpp"

namespace cellassoc {

enum class PolicyKind { nearest, random, max_ratio, opt_coverage, opt_rate };

/// An association rule i* = argmax_i score(r_i); the served base station is
/// always the nearest one of the chosen technology.
struct Policy {
  PolicyKind kind = PolicyKind::nearest;
  std::size_t k = 1;  ///< information depth for the optimal policies

  /// Parses `nearest`, `random`, `max-ratio`, `opt-cov:k=<n>`, `opt-rate:k=<n>`.
  static Policy parse(const std::string& text);
  std::string name() const;
  /// Number of nearest distances the policy reads per technology.
  std::size_t depth() const;
  void validate() const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

double score_nearest(const Observation& obs);
/// r2 / r1; needs at least two distances.
double score_max_ratio(const Observation& obs);
/// Conditional coverage of the nearest base station given every observed distance.
double score_opt_coverage(const Observation& obs, const TechnologyConfig& cfg);
/// Conditional average rate of the nearest base station given every observed distance.
double score_opt_rate(const Observation& obs, const TechnologyConfig& cfg,
                      const QuadratureSpec& spec = {});

/// A policy bound to a technology list, with the per-technology kernels prepared
/// once. Immutable; decide() may be called concurrently.
class BoundPolicy {
 public:
  BoundPolicy(Policy policy, std::span<const TechnologyConfig> configs);

  const Policy& policy() const { return policy_; }
  std::span<const TechnologyConfig> configs() const { return configs_; }

  /// Score of one technology's observation (1-based technology in `obs`).
  double score(const Observation& obs) const;

  /// Reads the first T technologies of `world`; the world may hold more. The
  /// random policy draws from `rng`; the others ignore it.
  PolicyDecision decide(const NetworkRealization& world, RandomStream& rng) const;

 private:
  Policy policy_;
  std::vector<TechnologyConfig> configs_;
  std::vector<analytic::ConditionalCoverage> kernels_;
};

PolicyDecision decide(const Policy& policy, const NetworkRealization& world,
                      std::span<const TechnologyConfig> configs, RandomStream& rng);

/// Whether the policy's score CDF is known in closed form (nearest, max-ratio,
/// opt-cov:k=1) or by one-dimensional quadrature (opt-cov:k=2, N0 = 0).
bool has_score_cdf(const Policy& policy, const TechnologyConfig& cfg);

/// Generic-evaluator ingredients for every technology. Throws ArgumentError when the
/// policy has no usable score CDF for these parameters.
std::vector<analytic::PolicyPieces> policy_pieces(const Policy& policy, Metric metric,
                                                  std::span<const TechnologyConfig> configs,
                                                  const QuadratureSpec& spec = {});

/// nullopt when analytic_performance can evaluate the pair, else the reason.
std::optional<std::string> analytic_unavailable_reason(const Policy& policy, Metric metric,
                                                       std::span<const TechnologyConfig> configs);

/// Analytic coverage probability or average rate of the policy. Uses the
/// dedicated closed forms where they apply and the generic evaluator otherwise.
double analytic_performance(const Policy& policy, Metric metric,
                            std::span<const TechnologyConfig> configs,
                            const QuadratureSpec& spec = {});

}  // namespace cellassoc
