#include "validation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cellassoc/analytic.hpp"
#include "cellassoc/montecarlo.hpp"
#include "cellassoc/policies.hpp"
#include "experiment.hpp"

namespace cellassoc::cli {
namespace {

using std::numbers::pi;

TechnologyConfig reference_technology(double beta = 1.0) {
  TechnologyConfig t;
  t.lambda = 1.0 / pi;
  t.alpha = 4.0;
  t.beta = beta;
  return t;
}

CheckResult relative(std::string name, double value, double reference, double tol) {
  CheckResult c;
  c.name = std::move(name);
  c.observed = std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
  c.required = tol;
  c.status = c.observed <= tol ? CheckStatus::pass : CheckStatus::fail;
  c.detail = "value " + format_number(value) + " vs " + format_number(reference);
  return c;
}

CheckResult skipped(std::string name, std::size_t n) {
  CheckResult c;
  c.name = std::move(name);
  c.status = CheckStatus::skipped;
  c.detail = "skipped-insufficient-samples (n_worlds=" + std::to_string(n) + " < " +
             std::to_string(kMinStatisticalWorlds) + ")";
  return c;
}

// E[cp(r1, R2) | r1] with R2 | r1 having density 2 pi lambda r2 e^{-pi lambda (r2^2 - r1^2)}
// must reproduce cp(r1).
double tower(const TwoDistanceKernel& kernel, double r1, const TechnologyConfig& cfg) {
  QuadratureSpec spec;
  spec = spec.tighter();
  return integrate(
      [&](double r2) {
        if (r2 <= r1) return 0.0;
        const double density =
            2.0 * pi * cfg.lambda * r2 * std::exp(-pi * cfg.lambda * (r2 * r2 - r1 * r1));
        return density == 0.0 ? 0.0 : kernel(r1, r2, cfg) * density;
      },
      r1, kInf, spec);
}

void identity_checks(const ValidateOptions& options, std::vector<CheckResult>& out) {
  const auto ref = reference_technology();
  const double anchor = 1.0 / (1.0 + pi / 4.0);
  const std::vector<double> unit{1.0};
  const double closed_t1 = analytic::cp_max_ratio_closed(unit, 4.0);
  out.push_back(relative("anchor.max_ratio_closed.T1", closed_t1, anchor, 1e-6));
  out.push_back(relative("identity.ratio_bound_x1.T1",
                         analytic::sir_coverage_given_ratio_bound(1.0, 1.0, 4.0), closed_t1, 1e-12));

  for (std::size_t t : {1u, 2u, 5u}) {
    const auto cs = replicate(ref, t);
    const std::vector<double> betas(t, 1.0);
    out.push_back(relative("identity.max_ratio_general_closed.T" + std::to_string(t),
                           analytic::cp_max_ratio_general(cs),
                           analytic::cp_max_ratio_closed(betas, 4.0), 1e-6));
  }
  for (std::size_t t : {2u, 5u}) {
    const auto cs = replicate(ref, t);
    const auto nearest = policy_pieces(Policy::parse("opt-cov:k=1"), Metric::coverage, cs);
    out.push_back(relative("identity.generic_opt_nearest.T" + std::to_string(t),
                           analytic::evaluate_policy_analytic(nearest), analytic::cp_opt_nearest(cs),
                           1e-6));
    const auto ratio = policy_pieces(Policy::parse("max-ratio"), Metric::coverage, cs);
    out.push_back(relative("identity.generic_max_ratio.T" + std::to_string(t),
                           analytic::evaluate_policy_analytic(ratio),
                           analytic::cp_max_ratio_general(cs), 1e-6));
  }
  for (std::size_t t : {1u, 2u}) {
    out.push_back(relative("identity.max_ratio_rate_general_closed.T" + std::to_string(t),
                           analytic::rate_max_ratio_general(replicate(ref, t)),
                           analytic::rate_max_ratio_closed(t, 4.0), 1e-6));
  }

  const TwoDistanceKernel kernel =
      options.two_distance ? options.two_distance : TwoDistanceKernel(analytic::cp_given_r1_r2);
  for (double noise : {0.0, 0.1}) {
    auto cfg = ref;
    cfg.noise = noise;
    for (double r1 : {0.5, 1.0, 1.5}) {
      out.push_back(relative("identity.two_distance_tower.N0=" + format_number(noise) +
                                 ".r1=" + format_number(r1),
                             tower(kernel, r1, cfg), analytic::cp_given_r1(r1, cfg), 1e-6));
    }
  }

  auto scaled = ref;
  scaled.lambda *= 4.0;
  for (const char* name : {"max-ratio", "opt-cov:k=1", "opt-cov:k=2"}) {
    const auto p = Policy::parse(name);
    out.push_back(relative(std::string("invariance.lambda.") + name,
                           analytic_performance(p, Metric::coverage, replicate(scaled, 2)),
                           analytic_performance(p, Metric::coverage, replicate(ref, 2)), 1e-6));
  }
}

void monte_carlo_checks(const ValidateOptions& options, std::size_t n,
                        std::vector<CheckResult>& out) {
  const std::vector<std::string> policies{"nearest", "max-ratio", "opt-cov:k=1", "opt-cov:k=2"};
  const std::vector<std::size_t> counts{1, 2, 5, 8};
  const std::vector<double> betas_db{-5.0, 0.0, 5.0};
  std::vector<std::string> names;
  std::vector<Arm> arms;
  std::vector<double> expected;
  for (const auto& p : policies) {
    for (std::size_t t : counts) {
      for (double db : betas_db) {
        const auto cs = replicate(reference_technology(db_to_linear(db)), t);
        const auto policy = Policy::parse(p);
        names.push_back("mc.grid." + p + ".T" + std::to_string(t) + ".beta" + format_number(db) +
                        "dB");
        if (n < kMinStatisticalWorlds) continue;
        arms.push_back({policy, Metric::coverage, cs});
        expected.push_back(analytic_performance(policy, Metric::coverage, cs));
      }
    }
  }
  if (n < kMinStatisticalWorlds) {
    out.push_back(skipped("mc.anchor.nearest_T1", n));
    for (const auto& name : names) out.push_back(skipped(name, n));
    return;
  }

  MonteCarloSpec mc;
  mc.n_worlds = n;
  mc.sampler.seed = options.seed;
  mc.workers = options.workers;
  const auto batch = estimate_batch(arms, mc);

  // The first arm is nearest, T=1, beta=-5 dB; the anchor uses 0 dB.
  const auto& anchor = batch[1];
  const double exact = 1.0 / (1.0 + pi / 4.0);
  CheckResult a;
  a.name = "mc.anchor.nearest_T1";
  a.observed = anchor.value;
  a.required = exact;
  a.status = anchor.brackets(exact) ? CheckStatus::pass : CheckStatus::fail;
  a.detail = "95% CI [" + format_number(anchor.ci_low) + ", " + format_number(anchor.ci_high) +
             "] must contain " + format_number(exact);
  out.push_back(a);

  for (std::size_t i = 0; i < arms.size(); ++i) {
    const auto& e = batch[i];
    CheckResult c;
    c.name = names[i];
    const double diff = std::abs(e.value - expected[i]);
    c.observed = e.standard_error > 0.0 ? diff / e.standard_error
                                         : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    c.required = 3.0;
    c.status = c.observed <= c.required ? CheckStatus::pass : CheckStatus::fail;
    c.detail = "monte-carlo " + format_number(e.value) + " (se " + format_number(e.standard_error) +
               ") vs analytic " + format_number(expected[i]) + "; observed in standard errors";
    out.push_back(c);
  }
}

void ks_checks(const ValidateOptions& options, std::size_t n, std::vector<CheckResult>& out) {
  const char* names[] = {"ks.r1_rayleigh", "ks.ratio_law", "ks.cp_single_distance"};
  if (n < kMinStatisticalWorlds) {
    for (const char* name : names) out.push_back(skipped(name, n));
    return;
  }
  const auto cfg = reference_technology();
  const analytic::ConditionalCoverage cp(cfg);
  RandomStream rng(options.seed, 7, 0);
  std::vector<double> r1(n), ratio(n), score(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = sample_distances(cfg.lambda, 2, rng);
    r1[i] = r[0];
    ratio[i] = r[1] / r[0];
    score[i] = cp(std::span<const double>(r.data(), 1));
  }
  // 99% critical value of the KS distance, floored at the 0.01 target.
  const double bound = std::max(0.01, 1.63 / std::sqrt(static_cast<double>(n)));
  const double d[] = {
      ks_statistic(r1, [&](double x) { return 1.0 - std::exp(-pi * cfg.lambda * x * x); }),
      ks_statistic(ratio, [](double x) { return x < 1.0 ? 0.0 : analytic::cdf_max_ratio(x); }),
      ks_statistic(score,
                   [&](double y) {
                     if (y <= 0.0) return 0.0;
                     if (y >= 1.0) return 1.0;
                     return analytic::cdf_opt_nearest(y, cfg.beta, cfg.alpha);
                   }),
  };
  for (int i = 0; i < 3; ++i) {
    CheckResult c;
    c.name = names[i];
    c.observed = d[i];
    c.required = bound;
    c.status = d[i] < bound ? CheckStatus::pass : CheckStatus::fail;
    c.detail = "KS distance over " + std::to_string(n) + " samples";
    out.push_back(c);
  }
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "unknown";
}

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  const std::size_t n = options.n_worlds ? options.n_worlds : (options.quick ? 10000 : 100000);
  std::vector<CheckResult> out;
  identity_checks(options, out);
  monte_carlo_checks(options, n, out);
  ks_checks(options, n, out);
  return out;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::fail) return false;
  }
  return true;
}

void write_report_csv(std::ostream& out, const std::vector<CheckResult>& checks) {
  out << "check,status,observed,required,detail\n";
  for (const auto& c : checks) {
    const bool numeric = c.status != CheckStatus::skipped;
    out << c.name << ',' << to_string(c.status) << ',' << (numeric ? format_number(c.observed) : "")
        << ',' << (numeric ? format_number(c.required) : "") << ",\"" << c.detail << "\"\n";
  }
}

}  // namespace cellassoc::cli
