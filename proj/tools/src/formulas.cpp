#include "formulas.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "cellassoc/analytic.hpp"
#include "cellassoc/types.hpp"

namespace cellassoc::cli {
namespace {

const std::set<std::string> kTechnologyKeys{"lambda", "alpha", "beta", "beta_db", "noise",
                                            "power",  "mu",    "bandwidth"};

struct Formula {
  std::string name;
  std::vector<std::string> required;
  bool technology;  // accepts the technology keys
  std::string summary;
  std::function<double(const std::map<std::string, double>&, const TechnologyConfig&)> eval;
};

std::size_t as_count(double v, const std::string& key) {
  if (!(v >= 1.0) || std::floor(v) != v) throw ArgumentError(key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

const std::vector<Formula>& formulas() {
  using P = std::map<std::string, double>;
  static const std::vector<Formula> table{
      {"eq11", {"r1"}, true, "coverage given the nearest distance r1",
       [](const P& p, const TechnologyConfig& c) { return analytic::cp_given_r1(p.at("r1"), c); }},
      {"eq12", {"r1", "r2"}, true, "coverage given the two nearest distances r1 < r2",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::cp_given_r1_r2(p.at("r1"), p.at("r2"), c);
       }},
      {"eq13", {"y"}, true, "CDF of the single-distance optimal score at y (N0 = 0)",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::cdf_opt_nearest(p.at("y"), c.beta, c.alpha);
       }},
      {"eq15", {"x"}, false, "CDF of r2/r1 at x",
       [](const P& p, const TechnologyConfig&) { return analytic::cdf_max_ratio(p.at("x")); }},
      {"eq16", {"T"}, true, "max-ratio coverage for T identical technologies",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::cp_max_ratio_general(replicate(c, as_count(p.at("T"), "T")));
       }},
      {"eq17", {"t"}, true, "coverage given r2/r1 = t",
       [](const P& p, const TechnologyConfig& c) { return analytic::cp_cond_ratio(p.at("t"), c); }},
      {"eq18", {"T"}, true, "max-ratio average rate for T identical technologies",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::rate_max_ratio_general(replicate(c, as_count(p.at("T"), "T")));
       }},
      {"eq19", {"T"}, true, "interference-limited max-ratio coverage (uses beta, alpha)",
       [](const P& p, const TechnologyConfig& c) {
         const std::vector<double> betas(as_count(p.at("T"), "T"), c.beta);
         return analytic::cp_max_ratio_closed(betas, c.alpha);
       }},
      {"eq20", {"T"}, true, "interference-limited max-ratio average rate (uses alpha)",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::rate_max_ratio_closed(as_count(p.at("T"), "T"), c.alpha);
       }},
      {"cor1", {"T"}, true, "optimal coverage knowing r1 of T identical technologies (N0 = 0)",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::cp_opt_nearest(replicate(c, as_count(p.at("T"), "T")));
       }},
      {"lemma6", {"x"}, true, "P[SIR >= beta | r2/r1 >= 1/x] (uses beta, alpha)",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::sir_coverage_given_ratio_bound(p.at("x"), c.beta, c.alpha);
       }},
      {"phi", {"y", "x"}, true, "phi(alpha, y, x) (uses alpha)",
       [](const P& p, const TechnologyConfig& c) {
         return analytic::phi(c.alpha, p.at("y"), p.at("x"));
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& formula_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : formulas()) out.push_back(f.name);
    return out;
  }();
  return names;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& tokens) {
  std::map<std::string, double> out;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ArgumentError("parameter '" + token + "' is not key=value");
    }
    const std::string key = token.substr(0, eq);
    const std::string text = token.substr(eq + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      throw ArgumentError("parameter '" + key + "' has a non-numeric value '" + text + "'");
    }
    if (!out.emplace(key, value).second) throw ArgumentError("parameter '" + key + "' repeated");
  }
  return out;
}

double evaluate_formula(const std::string& name, const std::map<std::string, double>& params) {
  const Formula* formula = nullptr;
  for (const auto& f : formulas()) {
    if (f.name == name) formula = &f;
  }
  if (!formula) throw ArgumentError("unknown formula '" + name + "'");

  for (const auto& key : formula->required) {
    if (!params.contains(key)) throw ArgumentError(name + " needs parameter '" + key + "'");
  }
  for (const auto& [key, value] : params) {
    const bool known =
        std::find(formula->required.begin(), formula->required.end(), key) !=
            formula->required.end() ||
        (formula->technology && kTechnologyKeys.contains(key));
    if (!known) throw ArgumentError(name + " does not take parameter '" + key + "'");
  }
  if (params.contains("beta") && params.contains("beta_db")) {
    throw ArgumentError("give either beta or beta_db");
  }

  TechnologyConfig cfg;
  cfg.lambda = 1.0 / std::numbers::pi;
  auto set = [&](const char* key, double& field) {
    if (auto it = params.find(key); it != params.end()) field = it->second;
  };
  set("lambda", cfg.lambda);
  set("alpha", cfg.alpha);
  set("beta", cfg.beta);
  set("noise", cfg.noise);
  set("power", cfg.power);
  set("mu", cfg.fading_mean_inv);
  set("bandwidth", cfg.bandwidth);
  if (auto it = params.find("beta_db"); it != params.end()) cfg.beta = db_to_linear(it->second);
  if (formula->technology) cfg.validate();
  return formula->eval(params, cfg);
}

std::string formula_help() {
  std::string out;
  for (const auto& f : formulas()) {
    out += "  " + f.name + " [";
    for (std::size_t i = 0; i < f.required.size(); ++i) out += (i ? " " : "") + f.required[i];
    out += "] " + f.summary + "\n";
  }
  out += "  technology keys: lambda alpha beta|beta_db noise power mu bandwidth\n";
  return out;
}

}  // namespace cellassoc::cli
