// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cellassoc/analytic.hpp"
#include "cellassoc/montecarlo.hpp"
#include "cellassoc/policies.hpp"
#include "experiment.hpp"
#include "figures.hpp"

namespace {

using namespace cellassoc;
using cellassoc::cli::format_number;
using std::numbers::pi;

constexpr std::size_t kWorlds = 1000000;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

TechnologyConfig reference(double beta_db = 0.0, double alpha = 4.0) {
  TechnologyConfig t;
  t.lambda = 1.0 / pi;
  t.alpha = alpha;
  t.beta = db_to_linear(beta_db);
  return t;
}

MonteCarloSpec mc_spec(std::size_t n, std::uint64_t seed = 1) {
  MonteCarloSpec s;
  s.n_worlds = n;
  s.sampler.seed = seed;
  return s;
}

std::string fmt(double x) { return format_number(x); }

// Monte Carlo within 3 standard errors of the analytic value.
bool within_3se(const PerformanceEstimate& e, double exact) {
  return std::abs(e.value - exact) <= 3.0 * e.standard_error;
}

Outcome criterion1() {
  Outcome o;
  // phi(4, 1, 1) = \int_1^\infty du / (1 + u^2) = pi/2 - arctan(1).
  const double oracle = 1.0 / (1.0 + (pi / 2.0 - std::atan(1.0)));
  const std::vector<double> unit{1.0};
  const double closed = analytic::cp_max_ratio_closed(unit, 4.0);
  o.require(std::abs(closed - oracle) <= 1e-6, "closed-form max-ratio (T=1, alpha=4, beta=1) = " +
                                                   fmt(closed) + " vs arctan oracle " + fmt(oracle));
  const auto start = std::chrono::steady_clock::now();
  const auto e = estimate(Policy::parse("nearest"), Metric::coverage, replicate(reference(), 1),
                          mc_spec(kWorlds));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(e.brackets(oracle), "Monte Carlo nearest T=1, 10^6 worlds: " + fmt(e.value) +
                                    " 95% CI [" + fmt(e.ci_low) + ", " + fmt(e.ci_high) + "]");
  o.require(seconds < 60.0, "runtime " + fmt(seconds) + " s < 60 s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::vector<Arm> arms;
  std::vector<double> exact;
  std::vector<std::string> names;
  for (const char* p : {"nearest", "max-ratio", "opt-cov:k=1", "opt-cov:k=2"}) {
    for (std::size_t t : {1u, 2u, 5u, 8u}) {
      for (double db : {-5.0, 0.0, 5.0}) {
        const auto cs = replicate(reference(db), t);
        arms.push_back({Policy::parse(p), Metric::coverage, cs});
        exact.push_back(analytic_performance(arms.back().policy, Metric::coverage, cs));
        names.push_back(std::string(p) + " T=" + std::to_string(t) + " beta=" + fmt(db) + "dB");
      }
    }
  }
  const auto batch = estimate_batch(arms, mc_spec(kWorlds));
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const auto& e = batch[i];
    o.require(within_3se(e, exact[i]), names[i] + ": analytic " + fmt(exact[i]) + ", MC " +
                                           fmt(e.value) + " (se " + fmt(e.standard_error) +
                                           ", z " + fmt((e.value - exact[i]) / e.standard_error) +
                                           ")");
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(seconds < 600.0, "runtime " + fmt(seconds) + " s < 600 s");
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const auto ref = reference();
  for (std::size_t t : {1u, 2u, 5u}) {
    const auto cs = replicate(ref, t);
    const std::vector<double> betas(t, 1.0);
    const double general = analytic::cp_max_ratio_general(cs);
    const double closed = analytic::cp_max_ratio_closed(betas, 4.0);
    o.require(rel(general, closed) <= 1e-6,
              "general = interference-limited max-ratio at N0=0, T=" + std::to_string(t) + ": " +
                  fmt(general) + " vs " + fmt(closed));
  }
  for (std::size_t t : {1u, 2u, 5u, 8u}) {
    const auto cs = replicate(ref, t);
    const double generic_nearest = analytic::evaluate_policy_analytic(
        policy_pieces(Policy::parse("opt-cov:k=1"), Metric::coverage, cs));
    const double nearest = analytic::cp_opt_nearest(cs);
    o.require(rel(generic_nearest, nearest) <= 1e-6,
              "generic evaluator = single-distance optimal form, T=" + std::to_string(t) + ": " +
                  fmt(generic_nearest) + " vs " + fmt(nearest));
    const double generic_ratio = analytic::evaluate_policy_analytic(
        policy_pieces(Policy::parse("max-ratio"), Metric::coverage, cs));
    const double general = analytic::cp_max_ratio_general(cs);
    o.require(rel(generic_ratio, general) <= 1e-6,
              "generic evaluator = general max-ratio form, T=" + std::to_string(t) + ": " +
                  fmt(generic_ratio) + " vs " + fmt(general));
  }
  for (double db : {-5.0, 0.0, 5.0}) {
    const double b = db_to_linear(db);
    const std::vector<double> one{b};
    const double bound = analytic::sir_coverage_given_ratio_bound(1.0, b, 4.0);
    const double closed = analytic::cp_max_ratio_closed(one, 4.0);
    o.require(rel(bound, closed) <= 1e-12,
              "ratio-bound coverage at x=1 = closed-form max-ratio T=1, beta=" + fmt(db) +
                  "dB: " + fmt(bound));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  const std::size_t n = 100000;
  const auto cfg = reference();
  const analytic::ConditionalCoverage cp(cfg);
  RandomStream rng(2024, 11, 0);
  std::vector<double> r1(n), ratio(n), score(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = sample_distances(cfg.lambda, 2, rng);
    r1[i] = r[0];
    ratio[i] = r[1] / r[0];
    score[i] = cp(std::span<const double>(r.data(), 1));
  }
  const double a = ks_statistic(r1, [&](double x) { return 1.0 - std::exp(-pi * cfg.lambda * x * x); });
  const double b = ks_statistic(ratio, [](double x) { return x < 1.0 ? 0.0 : 1.0 - 1.0 / (x * x); });
  const double c = ks_statistic(score, [&](double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    return analytic::cdf_opt_nearest(y, cfg.beta, cfg.alpha);
  });
  o.require(a < 0.01, "KS r1 vs Rayleigh: " + fmt(a));
  o.require(b < 0.01, "KS r2/r1 vs 1 - 1/x^2: " + fmt(b));
  o.require(c < 0.01, "KS cp(r1) vs single-distance score CDF: " + fmt(c));
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::vector<Arm> arms;
  for (int k = 1; k <= 5; ++k) {
    arms.push_back({Policy::parse("opt-cov:k=" + std::to_string(k)), Metric::coverage,
                    replicate(reference(0.0), 10)});
  }
  const auto batch = estimate_batch(arms, mc_spec(kWorlds));
  for (std::size_t k = 0; k < 5; ++k) {
    o.lines.push_back("     R" + std::to_string(k + 1) + " = " + fmt(batch[k].value) + " (se " +
                      fmt(batch[k].standard_error) + ")");
  }
  for (std::size_t k = 0; k + 1 < 5; ++k) {
    const double d = batch.difference(k + 1, k);
    const double se = batch.difference_standard_error(k + 1, k);
    o.require(d >= -2.0 * se, "R" + std::to_string(k + 2) + " - R" + std::to_string(k + 1) +
                                  " = " + fmt(d) + " >= -2 se (" + fmt(-2.0 * se) + ")");
  }
  const double d21 = batch.difference(1, 0);
  const double se21 = batch.difference_standard_error(1, 0);
  o.require(d21 > 4.0 * se21, "R2 - R1 = " + fmt(d21) + " > 4 se (" + fmt(4.0 * se21) + ")");
  const double d52 = batch.difference(4, 1);
  const double se52 = batch.difference_standard_error(4, 1);
  const double bound = std::max(2.0 * se52, 0.01);
  o.require(std::abs(d52) < bound, "|R5 - R2| = " + fmt(std::abs(d52)) + " < " + fmt(bound));
  return o;
}

// Looks up the Monte Carlo arm of a run by policy and sweep value.
std::size_t arm_of(const cli::RunResult& r, const std::string& policy, double sweep) {
  for (std::size_t i = 0; i < r.scenarios.size(); ++i) {
    if (r.scenarios[i].policy.name() == policy && r.scenarios[i].sweep_value == sweep) return i;
  }
  throw std::runtime_error("no arm " + policy + " at " + fmt(sweep));
}

Outcome criterion6() {
  Outcome o;
  double previous = -1.0, previous_se = 0.0;
  for (double alpha : {3.0, 4.0, 6.0, 8.0, 10.0}) {
    const auto a = agreement_rate(Policy::parse("max-ratio"), Policy::parse("opt-cov:k=2"),
                                  replicate(reference(0.0, alpha), 2), mc_spec(kWorlds));
    const double se = std::sqrt(a.rate * (1.0 - a.rate) / static_cast<double>(a.n_samples));
    if (previous >= 0.0) {
      const double slack = 2.0 * std::hypot(se, previous_se);
      o.require(a.rate >= previous - slack, "agreement alpha=" + fmt(alpha) + ": " + fmt(a.rate) +
                                                " >= previous " + fmt(previous) + " - 2 se");
    } else {
      o.lines.push_back("     agreement alpha=" + fmt(alpha) + ": " + fmt(a.rate));
    }
    if (alpha == 10.0) o.require(a.rate >= 0.99, "agreement at alpha=10 = " + fmt(a.rate) + " >= 0.99");
    previous = a.rate;
    previous_se = se;
  }
  const auto runs = cli::figure_runs("fig3-rate");
  const auto result = cli::run(runs.front().spec);
  const auto& batch = *result.monte_carlo;
  for (double alpha : {5.0, 6.0, 7.0}) {
    const auto i = arm_of(result, "max-ratio", alpha);
    const auto j = arm_of(result, "opt-rate:k=2", alpha);
    const double gap = batch.difference(j, i);
    const double se = batch.difference_standard_error(j, i);
    o.require(std::abs(gap) < 2.0 * se, "fig3-rate alpha=" + fmt(alpha) + ": |opt-rate:k=2 - max-ratio| = " +
                                            fmt(std::abs(gap)) + " < 2 se (" + fmt(2.0 * se) + ")");
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::vector<cli::RunResult> fig3;
  for (const auto& r : cli::figure_runs("fig3-cov")) fig3.push_back(cli::run(r.spec));
  const auto betas = cli::figure_runs("fig3-cov").front().spec.sweep.values;
  const char* label[] = {"T=5", "T=8"};
  for (std::size_t f = 0; f < 2; ++f) {
    const auto& r = fig3[f];
    const auto& batch = *r.monte_carlo;
    for (double db : betas) {
      const auto mr = arm_of(r, "max-ratio", db);
      const auto oc = arm_of(r, "opt-cov:k=1", db);
      const auto rnd = arm_of(r, "random", db);
      const std::string where = std::string(label[f]) + " beta=" + fmt(db) + "dB: ";
      o.require(batch.difference(mr, oc) > 2.0 * batch.difference_standard_error(mr, oc),
                where + "max-ratio " + fmt(batch[mr].value) + " > opt-cov:k=1 " +
                    fmt(batch[oc].value) + " by > 2 se");
      o.require(batch.difference(oc, rnd) > 2.0 * batch.difference_standard_error(oc, rnd),
                where + "opt-cov:k=1 " + fmt(batch[oc].value) + " > random " +
                    fmt(batch[rnd].value) + " by > 2 se");
    }
  }
  // The growth is a contrast of four arms on common worlds, so its error comes
  // from the per-world contrast rather than from two independent gap errors.
  std::vector<Arm> arms;
  for (double db : betas) {
    for (const auto& r : fig3) {
      for (const char* p : {"max-ratio", "nearest"}) {
        const auto& sc = r.scenarios[arm_of(r, p, db)];
        arms.push_back({sc.policy, Metric::coverage, sc.technologies});
      }
    }
  }
  const auto fs = cli::figure_runs("fig3-cov").front().spec;
  auto spec = mc_spec(fs.n_worlds, fs.seed);
  spec.sampler.bs_count = fs.bs_count;
  const auto joint = estimate_batch(arms, spec);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const std::size_t k = 4 * i;
    const std::pair<std::size_t, double> terms[] = {
        {k + 2, 1.0}, {k + 3, -1.0}, {k, -1.0}, {k + 1, 1.0}};
    const auto growth = joint.contrast(terms);
    o.require(growth.value > 2.0 * growth.standard_error,
              "beta=" + fmt(betas[i]) + "dB: max-ratio gap over nearest " +
                  fmt(joint.difference(k, k + 1)) + " (T=5) -> " +
                  fmt(joint.difference(k + 2, k + 3)) + " (T=8) grows by " +
                  fmt(growth.value) + " > 2 se (" + fmt(2.0 * growth.standard_error) + ")");
  }

  const auto fig4 = cli::run(cli::figure_runs("fig4").front().spec);
  const auto& b4 = *fig4.monte_carlo;
  for (const char* p : {"nearest", "max-ratio"}) {
    double prev_t = 1.0;
    for (double t : {2.0, 4.0, 8.0}) {
      const auto i = arm_of(fig4, p, t);
      const auto j = arm_of(fig4, p, prev_t);
      o.require(b4.difference(i, j) > 2.0 * b4.difference_standard_error(i, j),
                std::string("fig4 ") + p + ": T=" + fmt(prev_t) + " " + fmt(b4[j].value) +
                    " < T=" + fmt(t) + " " + fmt(b4[i].value) + " by > 2 se");
      prev_t = t;
    }
  }
  for (double t = 2.0; t <= 12.0; t += 1.0) {
    const auto mr = arm_of(fig4, "max-ratio", t);
    const auto nn = arm_of(fig4, "nearest", t);
    o.require(b4.difference(mr, nn) > 2.0 * b4.difference_standard_error(mr, nn),
              "fig4 T=" + fmt(t) + ": max-ratio " + fmt(b4[mr].value) + " > nearest " +
                  fmt(b4[nn].value) + " by > 2 se");
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::vector<Arm> base, scaled;
  for (const char* p : {"nearest", "random", "max-ratio", "opt-cov:k=1", "opt-cov:k=2"}) {
    for (std::size_t t : {1u, 2u, 5u, 8u}) {
      auto cfg = reference();
      base.push_back({Policy::parse(p), Metric::coverage, replicate(cfg, t)});
      cfg.lambda *= 4.0;
      scaled.push_back({Policy::parse(p), Metric::coverage, replicate(cfg, t)});
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double a = analytic_performance(base[i].policy, Metric::coverage, base[i].configs);
    const double b = analytic_performance(scaled[i].policy, Metric::coverage, scaled[i].configs);
    worst = std::max(worst, std::abs(a - b));
  }
  o.require(worst < 1e-6, "analytic: largest change under lambda x4 = " + fmt(worst));
  const auto mb = estimate_batch(base, mc_spec(100000));
  const auto ms = estimate_batch(scaled, mc_spec(100000));
  double worst_z = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double se = std::hypot(mb[i].standard_error, ms[i].standard_error);
    const double d = std::abs(mb[i].value - ms[i].value);
    worst_z = std::max(worst_z, se > 0.0 ? d / se : (d == 0.0 ? 0.0 : INFINITY));
  }
  o.require(worst_z < 3.0, "Monte Carlo: largest change under lambda x4 = " + fmt(worst_z) + " se");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome criterion9(const std::string& cli_path, const std::filesystem::path& work) {
  Outcome o;
  std::filesystem::remove_all(work);
  auto invoke = [&](const std::string& args, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    const std::string cmd = "\"" + cli_path + "\" " + args + " --out \"" + out.string() +
                            "\" > \"" + (out / "stdout.txt").string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  struct Case {
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases{
      {"validate --quick --seed 7", {"validate.csv"}},
      {"figure fig2 --n-worlds 20000 --seed 7", {"fig2.csv"}},
      {"figure fig3-cov --n-worlds 20000 --seed 7", {"fig3-cov-T5.csv", "fig3-cov-T8.csv"}},
      {"figure fig3-rate --n-worlds 2000 --seed 7", {"fig3-rate.csv"}},
      {"figure fig4 --n-worlds 20000 --seed 7", {"fig4.csv"}},
  };
  int index = 0;
  for (const auto& c : cases) {
    const auto first = work / (std::to_string(index) + "a");
    const auto second = work / (std::to_string(index) + "b");
    ++index;
    const int s1 = invoke(c.args, first);
    const int s2 = invoke(c.args, second);
    o.require(s1 == 0 && s2 == 0, "`" + c.args + "` exit status 0 (got " + std::to_string(s1) +
                                      ", " + std::to_string(s2) + ")");
    for (const auto& f : c.files) {
      const auto a = slurp(first / f);
      const auto b = slurp(second / f);
      o.require(!a.empty() && a == b, f + " byte-identical across runs (" +
                                          std::to_string(a.size()) + " bytes)");
    }
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cellassoc acceptance suite"};
  std::string cli_path;
  std::string work_dir = "acceptance_work";
  std::vector<int> only;
  std::vector<int> expect_fail;
  app.add_option("--cli", cli_path, "Path to the cellassoc executable")->required();
  app.add_option("--work-dir", work_dir, "Scratch directory for CLI outputs");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--expect-fail", expect_fail,
                 "Criteria known to be unattainable; they still print FAIL, and the exit "
                 "status is nonzero only if the observed results differ from this list");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form anchor", criterion1},
      {"dual-path agreement grid", criterion2},
      {"specialization identities", criterion3},
      {"distribution laws (KS)", criterion4},
      {"information ordering in k", criterion5},
      {"max-ratio asymptotic optimality trend", criterion6},
      {"figure 3/4 orderings", criterion7},
      {"lambda invariance at N0=0", criterion8},
      {"determinism of CLI outputs", [&] { return criterion9(cli_path, work_dir); }},
  };

  bool as_expected = true;
  int passed = 0, run = 0;
  std::vector<std::string> summary;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& line : o.lines) std::printf("  [%d] %s\n", id, line.c_str());
    const bool expected_red =
        std::find(expect_fail.begin(), expect_fail.end(), id) != expect_fail.end();
    const char* note = o.pass == !expected_red ? ""
                       : o.pass              ? " [unexpected PASS]"
                                             : " [unexpected FAIL]";
    char buf[256];
    std::snprintf(buf, sizeof buf, "criterion %d %s: %s (%.1f s)%s", id, o.pass ? "PASS" : "FAIL",
                  criteria[i].first.c_str(), seconds, note);
    std::printf("%s\n", buf);
    std::fflush(stdout);
    summary.push_back(buf);
    as_expected = as_expected && o.pass != expected_red;
    passed += o.pass ? 1 : 0;
    ++run;
  }
  std::printf("\nSummary\n");
  for (const auto& s : summary) std::printf("%s\n", s.c_str());
  std::printf("%d of %d criteria PASS\n", passed, run);
  return as_expected ? 0 : 1;
}
