#include "figures.hpp"

#include <numbers>

namespace cellassoc::cli {
namespace {

std::vector<double> grid(double first, double last, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>((last - first) / step + 0.5);
  for (int i = 0; i <= n; ++i) out.push_back(first + step * i);
  return out;
}

ExperimentSpec base(const std::string& name, std::size_t technologies) {
  ExperimentSpec s;
  s.name = name;
  s.technologies = replicate(figure_technology(), technologies);
  s.engine = Engine::both;
  s.n_worlds = 1000000;
  return s;
}

}  // namespace

TechnologyConfig figure_technology() {
  TechnologyConfig t;
  t.lambda = 1.0 / std::numbers::pi;
  t.alpha = 4.0;
  t.beta = 1.0;
  t.noise = 0.0;
  return t;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2", "fig3-cov", "fig3-rate", "fig4"};
  return ids;
}

std::vector<FigureRun> figure_runs(const std::string& id, std::optional<std::size_t> n_worlds,
                                   std::optional<std::uint64_t> seed, std::size_t workers) {
  std::vector<FigureRun> runs;
  const auto beta_grid = grid(-10.0, 20.0, 2.5);
  if (id == "fig2") {
    auto s = base("fig2", 10);
    s.policies = {"opt-cov:k=1", "opt-cov:k=2", "opt-cov:k=3", "opt-cov:k=4", "opt-cov:k=5"};
    s.sweep = {"beta_db", beta_grid};
    runs.push_back({"fig2", s});
  } else if (id == "fig3-cov") {
    for (std::size_t t : {5u, 8u}) {
      const std::string name = "fig3-cov-T" + std::to_string(t);
      auto s = base(name, t);
      s.policies = {"nearest", "random", "max-ratio", "opt-cov:k=1", "opt-cov:k=2"};
      s.sweep = {"beta_db", beta_grid};
      runs.push_back({name, s});
    }
  } else if (id == "fig3-rate") {
    auto s = base("fig3-rate", 5);
    s.metric = Metric::rate;
    s.policies = {"nearest", "random", "max-ratio", "opt-rate:k=1", "opt-rate:k=2"};
    s.sweep = {"alpha", grid(2.5, 7.0, 0.5)};
    // Rate-optimal scores need a quadrature per technology and world.
    s.n_worlds = 100000;
    runs.push_back({"fig3-rate", s});
  } else if (id == "fig4") {
    auto s = base("fig4", 1);
    s.policies = {"nearest", "max-ratio"};
    s.sweep = {"T", grid(1.0, 12.0, 1.0)};
    runs.push_back({"fig4", s});
  } else {
    throw ArgumentError("unknown figure '" + id + "' (expected fig2, fig3-cov, fig3-rate, fig4)");
  }
  for (auto& r : runs) {
    if (n_worlds) r.spec.n_worlds = *n_worlds;
    if (seed) r.spec.seed = *seed;
    r.spec.workers = workers;
  }
  return runs;
}

}  // namespace cellassoc::cli
