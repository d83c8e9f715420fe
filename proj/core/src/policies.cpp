#include "cellassoc/policies.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace cellassoc {
namespace {

constexpr std::string_view kOptCoverage = "opt-cov:k=";
constexpr std::string_view kOptRate = "opt-rate:k=";

std::size_t parse_depth(std::string_view text, const std::string& whole) {
  std::size_t k = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, k);
  if (ec != std::errc() || ptr != end || k == 0) {
    throw ArgumentError("invalid information depth in policy '" + whole + "'");
  }
  return k;
}

bool interference_limited(std::span<const TechnologyConfig> configs) {
  return std::all_of(configs.begin(), configs.end(),
                     [](const TechnologyConfig& c) { return c.noise == 0.0; });
}

bool shared_alpha(std::span<const TechnologyConfig> configs) {
  return std::all_of(configs.begin(), configs.end(), [&](const TechnologyConfig& c) {
    return c.alpha == configs.front().alpha;
  });
}

void validate_configs(std::span<const TechnologyConfig> configs) {
  if (configs.empty()) throw ArgumentError("at least one technology is required");
  for (const auto& c : configs) c.validate();
}

// Group index per technology; equal indices mean identical laws.
std::vector<std::size_t> law_keys(std::span<const TechnologyConfig> configs) {
  std::vector<std::size_t> keys(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    keys[i] = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (same_law(configs[i], configs[j])) {
        keys[i] = keys[j];
        break;
      }
    }
  }
  return keys;
}

using Distances = std::span<const double>;

// Performance of the nearest base station given observed distances.
std::function<double(Distances)> performance_kernel(const TechnologyConfig& cfg, Metric metric,
                                                    const QuadratureSpec& spec) {
  const analytic::ConditionalCoverage cp(cfg);
  if (metric == Metric::coverage) return [cp](Distances r) { return cp(r); };
  return [cp, spec](Distances r) { return cp.rate(r, spec); };
}

}  // namespace

Policy Policy::parse(const std::string& text) {
  Policy p;
  const std::string_view view(text);
  if (view == "nearest") {
    p.kind = PolicyKind::nearest;
  } else if (view == "random") {
    p.kind = PolicyKind::random;
  } else if (view == "max-ratio") {
    p.kind = PolicyKind::max_ratio;
    p.k = 2;
  } else if (view.starts_with(kOptCoverage)) {
    p.kind = PolicyKind::opt_coverage;
    p.k = parse_depth(view.substr(kOptCoverage.size()), text);
  } else if (view.starts_with(kOptRate)) {
    p.kind = PolicyKind::opt_rate;
    p.k = parse_depth(view.substr(kOptRate.size()), text);
  } else {
    throw ArgumentError("unknown policy '" + text +
                        "' (expected nearest, random, max-ratio, opt-cov:k=<n>, opt-rate:k=<n>)");
  }
  return p;
}

std::string Policy::name() const {
  switch (kind) {
    case PolicyKind::nearest: return "nearest";
    case PolicyKind::random: return "random";
    case PolicyKind::max_ratio: return "max-ratio";
    case PolicyKind::opt_coverage: return std::string(kOptCoverage) + std::to_string(k);
    case PolicyKind::opt_rate: return std::string(kOptRate) + std::to_string(k);
  }
  return "unknown";
}

std::size_t Policy::depth() const {
  switch (kind) {
    case PolicyKind::nearest:
    case PolicyKind::random: return 1;
    case PolicyKind::max_ratio: return 2;
    default: return k;
  }
}

void Policy::validate() const {
  if (k < 1) throw ArgumentError("information depth k must be >= 1");
  if (kind == PolicyKind::max_ratio && k < 2) {
    throw ArgumentError("max-ratio needs at least two distances");
  }
}

double score_nearest(const Observation& obs) {
  if (obs.depth() < 1) throw ArgumentError("nearest needs one distance");
  return -obs.distances[0];
}

double score_max_ratio(const Observation& obs) {
  if (obs.depth() < 2) throw ArgumentError("max-ratio needs at least two distances");
  return obs.distances[1] / obs.distances[0];
}

double score_opt_coverage(const Observation& obs, const TechnologyConfig& cfg) {
  return analytic::cp_given_k_distances(obs.distances, cfg);
}

double score_opt_rate(const Observation& obs, const TechnologyConfig& cfg,
                      const QuadratureSpec& spec) {
  if (obs.depth() < 1) throw ArgumentError("at least one distance is required");
  return analytic::ConditionalCoverage(cfg).rate(obs.distances, spec);
}

BoundPolicy::BoundPolicy(Policy policy, std::span<const TechnologyConfig> configs)
    : policy_(policy), configs_(configs.begin(), configs.end()) {
  policy_.validate();
  validate_configs(configs_);
  if (policy_.kind == PolicyKind::opt_coverage || policy_.kind == PolicyKind::opt_rate) {
    kernels_.reserve(configs_.size());
    for (const auto& c : configs_) kernels_.emplace_back(c);
  }
}

double BoundPolicy::score(const Observation& obs) const {
  switch (policy_.kind) {
    case PolicyKind::nearest: return score_nearest(obs);
    case PolicyKind::max_ratio: return score_max_ratio(obs);
    case PolicyKind::opt_coverage: return kernels_.at(obs.technology - 1)(obs.distances);
    case PolicyKind::opt_rate: return kernels_.at(obs.technology - 1).rate(obs.distances);
    case PolicyKind::random: break;
  }
  throw ArgumentError("the random policy has no score");
}

PolicyDecision BoundPolicy::decide(const NetworkRealization& world, RandomStream& rng) const {
  const std::size_t count = configs_.size();
  if (world.technology_count() < count) {
    throw ArgumentError("realization has fewer technologies than the policy");
  }
  PolicyDecision decision;
  if (count == 1) return decision;
  if (policy_.kind == PolicyKind::random) {
    decision.technology = rng.below(count) + 1;
    return decision;
  }
  double best = 0.0;
  for (std::size_t i = 1; i <= count; ++i) {
    const double s = score(observe(world, i, policy_.depth()));
    if (i == 1 || s > best) {
      best = s;
      decision.technology = i;
    }
  }
  return decision;
}

PolicyDecision decide(const Policy& policy, const NetworkRealization& world,
                      std::span<const TechnologyConfig> configs, RandomStream& rng) {
  return BoundPolicy(policy, configs).decide(world, rng);
}

bool has_score_cdf(const Policy& policy, const TechnologyConfig& cfg) {
  switch (policy.kind) {
    case PolicyKind::nearest:
    case PolicyKind::max_ratio: return true;
    case PolicyKind::opt_coverage: return policy.k <= 2 && cfg.noise == 0.0;
    default: return false;
  }
}

std::vector<analytic::PolicyPieces> policy_pieces(const Policy& policy, Metric metric,
                                                  std::span<const TechnologyConfig> configs,
                                                  const QuadratureSpec& spec) {
  policy.validate();
  validate_configs(configs);
  for (const auto& c : configs) {
    if (!has_score_cdf(policy, c)) {
      throw ArgumentError("policy " + policy.name() + " has no score CDF for these parameters");
    }
  }
  const QuadratureSpec inner = spec.tighter().tighter();
  const auto keys = law_keys(configs);
  std::vector<analytic::PolicyPieces> pieces;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const TechnologyConfig cfg = configs[i];
    const double lambda = cfg.lambda;
    analytic::PolicyPieces p;
    p.law_key = keys[i];
    const auto perf = performance_kernel(cfg, metric, inner);
    if (policy.kind == PolicyKind::nearest ||
        (policy.kind == PolicyKind::opt_coverage && policy.k == 1)) {
      p.dimension = 1;
      p.domain = {{0.0, kInf}};
      p.density = [lambda](Distances r) {
        return analytic::nearest_distance_density(r[0], lambda);
      };
      p.performance = perf;
      if (policy.kind == PolicyKind::nearest) {
        p.score = [](Distances r) { return -r[0]; };
        p.score_cdf = [lambda](double y) { return analytic::cdf_nearest_score(y, lambda); };
      } else {
        const analytic::ConditionalCoverage cp(cfg);
        p.score = [cp](Distances r) { return cp(r); };
        p.score_cdf = [cfg](double y) {
          if (y <= 0.0) return 0.0;
          if (y >= 1.0) return 1.0;
          return analytic::cdf_opt_nearest(y, cfg.beta, cfg.alpha);
        };
      }
    } else {
      // Coordinates (u, v) = (r1, r2/r1).
      p.dimension = 2;
      p.domain = {{0.0, kInf}, {1.0, kInf}};
      p.density = [lambda](Distances r) {
        return analytic::ratio_joint_density(r[0], r[1], lambda);
      };
      p.performance = [perf](Distances r) {
        const std::array<double, 2> d{r[0], r[0] * r[1]};
        return perf(d);
      };
      if (policy.kind == PolicyKind::max_ratio) {
        p.score = [](Distances r) { return r[1]; };
        p.score_cdf = [](double y) { return y <= 1.0 ? 0.0 : analytic::cdf_max_ratio(y); };
      } else {
        const analytic::ConditionalCoverage cp(cfg);
        p.score = [cp](Distances r) {
          const std::array<double, 2> d{r[0], r[0] * r[1]};
          return cp(d);
        };
        p.score_cdf = [cfg, inner](double y) {
          return analytic::cdf_opt_coverage_2(y, cfg, inner);
        };
      }
    }
    pieces.push_back(std::move(p));
  }
  return pieces;
}

std::optional<std::string> analytic_unavailable_reason(const Policy& policy, Metric,
                                                       std::span<const TechnologyConfig> configs) {
  switch (policy.kind) {
    case PolicyKind::nearest:
    case PolicyKind::random:
    case PolicyKind::max_ratio: return std::nullopt;
    case PolicyKind::opt_coverage:
      if (policy.k > 2) {
        return "no score CDF is available for opt-cov with k > 2";
      }
      if (!interference_limited(configs)) {
        return "the opt-cov score CDF is only available for N0 = 0";
      }
      return std::nullopt;
    case PolicyKind::opt_rate: return "no score CDF is available for opt-rate policies";
  }
  return "unknown policy";
}

double analytic_performance(const Policy& policy, Metric metric,
                            std::span<const TechnologyConfig> configs,
                            const QuadratureSpec& spec) {
  policy.validate();
  validate_configs(configs);
  if (auto reason = analytic_unavailable_reason(policy, metric, configs)) {
    throw ArgumentError("no analytic expression for " + policy.name() + ": " + *reason);
  }
  const bool coverage = metric == Metric::coverage;

  if (policy.kind == PolicyKind::random) {
    // Uniform technology choice, nearest base station: average of the marginals.
    const QuadratureSpec inner = spec.tighter();
    double total = 0.0;
    for (const auto& c : configs) {
      const auto perf = performance_kernel(c, metric, inner);
      total += integrate(
          [&](double r) {
            const std::array<double, 1> d{r};
            return perf(d) * analytic::nearest_distance_density(r, c.lambda);
          },
          0.0, kInf, spec);
    }
    return total / static_cast<double>(configs.size());
  }

  if (policy.kind == PolicyKind::max_ratio) {
    const bool closed = interference_limited(configs) && shared_alpha(configs);
    if (coverage) {
      if (closed) {
        std::vector<double> betas;
        for (const auto& c : configs) betas.push_back(c.beta);
        return analytic::cp_max_ratio_closed(betas, configs.front().alpha, spec);
      }
      return analytic::cp_max_ratio_general(configs, spec);
    }
    const bool unit_bandwidth = std::all_of(configs.begin(), configs.end(),
                                            [](const auto& c) { return c.bandwidth == 1.0; });
    if (closed && unit_bandwidth) {
      return analytic::rate_max_ratio_closed(configs.size(), configs.front().alpha, spec);
    }
    return analytic::rate_max_ratio_general(configs, spec);
  }

  if (policy.kind == PolicyKind::opt_coverage && policy.k == 1 && coverage) {
    return analytic::cp_opt_nearest(configs, spec);
  }
  const auto pieces = policy_pieces(policy, metric, configs, spec);
  return analytic::evaluate_policy_analytic(pieces, spec);
}

}  // namespace cellassoc
