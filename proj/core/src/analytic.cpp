#include "cellassoc/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace cellassoc::analytic {
namespace {

using std::numbers::pi;

void require_increasing(std::span<const double> r) {
  if (r.empty()) throw ArgumentError("at least one distance is required");
  if (!(r[0] > 0.0)) throw ArgumentError("distances must be positive");
  for (std::size_t m = 1; m < r.size(); ++m) {
    if (!(r[m] > r[m - 1])) throw ArgumentError("distances must be strictly increasing");
  }
}

// Groups of statistically identical technologies: representative index and count.
std::vector<std::pair<std::size_t, std::size_t>> law_groups(
    std::span<const TechnologyConfig> configs) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    bool placed = false;
    for (auto& [rep, count] : groups) {
      if (same_law(configs[rep], configs[i])) {
        ++count;
        placed = true;
        break;
      }
    }
    if (!placed) groups.emplace_back(i, 1);
  }
  return groups;
}

void validate_all(std::span<const TechnologyConfig> configs) {
  if (configs.empty()) throw ArgumentError("at least one technology is required");
  for (const auto& c : configs) c.validate();
}

// Density of max_{j != i} r2/r1 against t, times the selecting technology's own
// ratio density: 2 t^-3 (1 - t^-2)^(T-1).
double ratio_selection_weight(double t, std::size_t technology_count) {
  const double inv2 = 1.0 / (t * t);
  return 2.0 * inv2 / t * std::pow(1.0 - inv2, static_cast<double>(technology_count - 1));
}

double to_threshold(double t) { return std::exp2(t) - 1.0; }

}  // namespace

ConditionalCoverage::ConditionalCoverage(const TechnologyConfig& cfg)
    : cfg_(cfg), tail_(&tail_table(cfg.alpha)) {
  cfg_.validate();
}

double ConditionalCoverage::at_threshold(std::span<const double> r, double beta) const {
  if (beta <= 0.0) return 1.0;
  if (!std::isfinite(beta)) return 0.0;
  const double a = cfg_.alpha;
  const double r1 = r[0];
  double value = 1.0;
  if (cfg_.noise > 0.0) {
    value = std::exp(-cfg_.fading_mean_inv * beta * cfg_.noise * std::pow(r1, a) / cfg_.power);
  }
  for (std::size_t m = 1; m < r.size(); ++m) {
    value /= 1.0 + beta * std::pow(r1 / r[m], a);
  }
  const double z = r.back() / r1 * std::pow(beta, -1.0 / a);
  const double tail = r1 * r1 * std::pow(beta, 2.0 / a) * (*tail_)(z);
  return value * std::exp(-2.0 * pi * cfg_.lambda * tail);
}

double ConditionalCoverage::rate(std::span<const double> r, const QuadratureSpec& spec) const {
  const double integral =
      integrate([&](double t) { return at_threshold(r, to_threshold(t)); }, 0.0, kInf, spec);
  return cfg_.bandwidth * integral;
}

double cp_given_r1(double r1, const TechnologyConfig& cfg) {
  const std::array<double, 1> r{r1};
  require_increasing(r);
  return ConditionalCoverage(cfg)(r);
}

double cp_given_r1_r2(double r1, double r2, const TechnologyConfig& cfg) {
  const std::array<double, 2> r{r1, r2};
  require_increasing(r);
  return ConditionalCoverage(cfg)(r);
}

double cp_given_k_distances(std::span<const double> r, const TechnologyConfig& cfg) {
  require_increasing(r);
  return ConditionalCoverage(cfg)(r);
}

double rate_from_coverage(const std::function<double(double)>& cp_kernel,
                          const QuadratureSpec& spec) {
  return integrate(
      [&](double t) {
        const double beta = to_threshold(t);
        return std::isfinite(beta) ? cp_kernel(beta) : 0.0;
      },
      0.0, kInf, spec);
}

double nearest_interference_exponent(double beta, double alpha) {
  if (!(beta > 0.0)) throw ArgumentError("beta must be > 0");
  return std::pow(beta, 2.0 / alpha) * tail_table(alpha)(std::pow(beta, -1.0 / alpha));
}

double cdf_opt_nearest(double y, double beta, double alpha) {
  if (!(y > 0.0 && y <= 1.0)) throw ArgumentError("score CDF argument must lie in (0, 1]");
  const double exponent = nearest_interference_exponent(beta, alpha);
  return std::exp(-std::log(1.0 / y) * 0.5 / exponent);
}

double cdf_max_ratio(double x) {
  if (!(x >= 1.0)) throw ArgumentError("distance ratio must be >= 1");
  return 1.0 - 1.0 / (x * x);
}

double cdf_nearest_score(double y, double lambda) {
  if (y >= 0.0) return 1.0;
  return std::exp(-pi * lambda * y * y);
}

double cdf_opt_coverage_2(double y, const TechnologyConfig& cfg, const QuadratureSpec& spec) {
  cfg.validate();
  if (cfg.noise != 0.0) {
    throw ArgumentError("two-distance score CDF is only available for N0 = 0");
  }
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const double a = cfg.alpha;
  const double beta = cfg.beta;
  const auto& tail = tail_table(a);
  const double scale = std::pow(beta, -1.0 / a);
  const double weight = std::pow(beta, 2.0 / a);

  // Below t* the signal factor h(t) is already under y, so the score is too.
  double t_star = 1.0;
  double certain = 0.0;
  if (y > 1.0 / (1.0 + beta)) {
    t_star = std::pow(beta * y / (1.0 - y), 1.0 / a);
    certain = 1.0 - 1.0 / (t_star * t_star);
  }
  // log(h / y) as a difference of log1p terms; h and y both sit near 1 far out.
  const double log_y = std::log1p(y - 1.0);
  auto integrand = [&](double t) {
    const double log_h = -std::log1p(beta * std::pow(t, -a));
    const double j = weight * tail(t * scale);
    const double c = t * t * (log_h - log_y) / (2.0 * j);
    if (!(c < 750.0)) return 0.0;  // also catches inf/inf far out in the tail
    const double survival = c > 0.0 ? (1.0 + c) * std::exp(-c) : 1.0;
    return 2.0 / (t * t * t) * survival;
  };
  // The error budget is relative to the whole CDF, not to the remaining piece.
  QuadratureSpec s = spec;
  s.abs_tol = std::max(spec.abs_tol, spec.rel_tol * certain);
  return certain + integrate(integrand, t_star, kInf, s);
}

double phi(double alpha, double y, double x, const QuadratureSpec& spec) {
  if (!(alpha > 2.0)) throw DivergenceError("phi diverges for alpha <= 2");
  if (y <= 0.0 || x <= 0.0) return 0.0;
  const double lower = std::pow(y, -2.0 / alpha);
  const double x_pow = std::pow(x, -alpha);
  QuadratureSpec s = spec;
  // The integrand decays like u^(-alpha/2); keep the mapped integrand bounded.
  s.tail_exponent = std::max(spec.tail_exponent, 2.0 / (alpha / 2.0 - 1.0));
  return integrate([&](double u) { return 1.0 / (1.0 + x_pow * std::pow(u, alpha / 2.0)); },
                   lower, kInf, s);
}

double sir_coverage_given_ratio_bound(double x, double beta, double alpha,
                                      const QuadratureSpec& spec) {
  if (beta <= 0.0) return 1.0;
  return 1.0 / (1.0 + std::pow(beta, 2.0 / alpha) * phi(alpha, beta, x, spec));
}

double cp_max_ratio_closed(std::span<const double> betas, double alpha,
                           const QuadratureSpec& spec) {
  if (betas.empty()) throw ArgumentError("at least one technology is required");
  if (!(alpha > 2.0)) throw DivergenceError("alpha must be > 2");
  const std::size_t count = betas.size();
  if (count == 1) return sir_coverage_given_ratio_bound(1.0, betas[0], alpha, spec);

  std::map<double, std::size_t> multiplicity;
  for (double b : betas) ++multiplicity[b];
  const QuadratureSpec inner = spec.tighter();
  const double n = static_cast<double>(count);
  double total = 0.0;
  for (const auto& [beta, times] : multiplicity) {
    auto integrand = [&](double x) {
      const double w = 2.0 * (n - 1.0) * x * x * x * std::pow(1.0 - x * x, n - 2.0);
      return w == 0.0 ? 0.0 : w * sir_coverage_given_ratio_bound(x, beta, alpha, inner);
    };
    total += static_cast<double>(times) * integrate(integrand, 0.0, 1.0, spec);
  }
  return total;
}

double rate_max_ratio_closed(std::size_t technology_count, double alpha,
                             const QuadratureSpec& spec) {
  if (technology_count == 0) throw ArgumentError("at least one technology is required");
  if (!(alpha > 2.0)) throw DivergenceError("alpha must be > 2");
  const QuadratureSpec inner = spec.tighter();
  auto conditional_rate = [&](double x, const QuadratureSpec& s) {
    return rate_from_coverage(
        [&](double beta) {
          return sir_coverage_given_ratio_bound(x, beta, alpha, s.tighter());
        },
        s);
  };
  if (technology_count == 1) return conditional_rate(1.0, spec);
  const double n = static_cast<double>(technology_count);
  auto integrand = [&](double x) {
    const double w = 2.0 * (n - 1.0) * x * x * x * std::pow(1.0 - x * x, n - 2.0);
    return w == 0.0 ? 0.0 : w * conditional_rate(x, inner);
  };
  return n * integrate(integrand, 0.0, 1.0, spec);
}

double cp_cond_ratio(double t, const TechnologyConfig& cfg, const QuadratureSpec& spec) {
  if (!(t >= 1.0)) throw ArgumentError("distance ratio must be >= 1");
  const ConditionalCoverage cp(cfg);
  const double rate = cfg.lambda * pi;
  // w = lambda pi (r1 t)^2 is Gamma(2, 1) given r2/r1 = t.
  return integrate(
      [&](double w) {
        if (w == 0.0) return 0.0;
        const double r1 = std::sqrt(w / rate) / t;
        const std::array<double, 2> r{r1, r1 * t};
        return cp(r) * w * std::exp(-w);
      },
      0.0, kInf, spec);
}

double cp_max_ratio_general(std::span<const TechnologyConfig> configs,
                            const QuadratureSpec& spec) {
  validate_all(configs);
  const QuadratureSpec inner = spec.tighter();
  double total = 0.0;
  for (const auto& [rep, count] : law_groups(configs)) {
    const auto& cfg = configs[rep];
    auto integrand = [&](double t) {
      return cp_cond_ratio(t, cfg, inner) * ratio_selection_weight(t, configs.size());
    };
    total += static_cast<double>(count) * integrate(integrand, 1.0, kInf, spec);
  }
  return total;
}

double rate_max_ratio_general(std::span<const TechnologyConfig> configs,
                              const QuadratureSpec& spec) {
  validate_all(configs);
  const QuadratureSpec middle = spec.tighter();
  const QuadratureSpec inner = middle.tighter();
  double total = 0.0;
  for (const auto& [rep, count] : law_groups(configs)) {
    auto coverage_at = [&](double beta) {
      TechnologyConfig cfg = configs[rep];
      cfg.beta = beta;
      return integrate(
          [&](double t) {
            return cp_cond_ratio(t, cfg, inner) * ratio_selection_weight(t, configs.size());
          },
          1.0, kInf, middle);
    };
    total += static_cast<double>(count) * configs[rep].bandwidth *
             rate_from_coverage(coverage_at, spec);
  }
  return total;
}

double cp_opt_nearest(std::span<const TechnologyConfig> configs, const QuadratureSpec& spec) {
  validate_all(configs);
  for (const auto& c : configs) {
    if (c.noise != 0.0) {
      throw ArgumentError("optimal nearest-distance coverage requires N0 = 0");
    }
  }
  const auto groups = law_groups(configs);
  double total = 0.0;
  for (const auto& [rep, count] : groups) {
    const ConditionalCoverage cp(configs[rep]);
    auto integrand = [&](double r) {
      const std::array<double, 1> obs{r};
      const double score = cp(obs);
      if (score <= 0.0) return 0.0;
      double value = score * nearest_distance_density(r, configs[rep].lambda);
      for (const auto& [other, other_count] : groups) {
        const std::size_t times = other == rep ? other_count - 1 : other_count;
        if (times == 0) continue;
        const auto& oc = configs[other];
        value *= std::pow(cdf_opt_nearest(score, oc.beta, oc.alpha), static_cast<double>(times));
      }
      return value;
    };
    total += static_cast<double>(count) * integrate(integrand, 0.0, kInf, spec);
  }
  return total;
}

double evaluate_policy_analytic(std::span<const PolicyPieces> pieces, const QuadratureSpec& spec) {
  if (pieces.empty()) throw ArgumentError("at least one technology is required");
  for (const auto& p : pieces) {
    if (p.dimension < 1 || p.dimension > 2) {
      throw ArgumentError("observation dimension " + std::to_string(p.dimension) +
                          " is unsupported (L must be 1 or 2)");
    }
    if (p.domain.size() != p.dimension) {
      throw ArgumentError("observation domain must have one range per coordinate");
    }
    if (!p.density || !p.score || !p.score_cdf || !p.performance) {
      throw ArgumentError("policy pieces are incomplete");
    }
  }

  // Representative index and multiplicity per law key.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    bool placed = false;
    if (pieces[i].law_key) {
      for (auto& [rep, count] : groups) {
        if (pieces[rep].law_key == pieces[i].law_key) {
          ++count;
          placed = true;
          break;
        }
      }
    }
    if (!placed) groups.emplace_back(i, 1);
  }

  double total = 0.0;
  for (const auto& [rep, count] : groups) {
    const PolicyPieces& own = pieces[rep];
    auto integrand = [&](std::span<const double> r) {
      const double density = own.density(r);
      if (density == 0.0) return 0.0;
      const double perf = own.performance(r);
      if (perf == 0.0) return 0.0;
      const double score = own.score(r);
      double value = perf * density;
      for (const auto& [other, other_count] : groups) {
        const std::size_t times = other == rep ? other_count - 1 : other_count;
        if (times == 0) continue;
        value *= std::pow(pieces[other].score_cdf(score), static_cast<double>(times));
        if (value == 0.0) break;
      }
      return value;
    };

    double contribution = 0.0;
    if (own.dimension == 1) {
      contribution = integrate(
          [&](double x) {
            const std::array<double, 1> r{x};
            return integrand(r);
          },
          own.domain[0].first, own.domain[0].second, spec);
    } else {
      const QuadratureSpec inner = spec.tighter();
      contribution = integrate(
          [&](double x) {
            return integrate(
                [&](double y) {
                  const std::array<double, 2> r{x, y};
                  return integrand(r);
                },
                own.domain[1].first, own.domain[1].second, inner);
          },
          own.domain[0].first, own.domain[0].second, spec);
    }
    total += static_cast<double>(count) * contribution;
  }
  return total;
}

double ratio_joint_density(double u, double v, double lambda) {
  const double c = 2.0 * pi * lambda;
  return c * c * u * u * u * v * std::exp(-lambda * pi * u * u * v * v);
}

double nearest_distance_density(double r, double lambda) {
  return 2.0 * pi * lambda * r * std::exp(-pi * lambda * r * r);
}

}  // namespace cellassoc::analytic
