#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cellassoc::cli {
namespace {

using nlohmann::json;

const std::set<std::string> kSweepVariables{"none", "beta_db", "alpha", "T", "k"};

class FieldReader {
 public:
  FieldReader(const json& obj, std::string where, std::vector<std::string>& problems)
      : obj_(obj), where_(std::move(where)), problems_(problems) {}

  template <class T>
  std::optional<T> get(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return std::nullopt;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      problems_.push_back(where_ + key + ": wrong type");
      return std::nullopt;
    }
  }

  void reject_unknown() {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) problems_.push_back(where_ + key + ": unknown field");
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

bool is_positive_integer(double v) { return v >= 1.0 && std::floor(v) == v && v < 1e6; }

Scenario apply(const ExperimentSpec& spec, const std::string& policy_name, double value) {
  Scenario s;
  s.sweep_value = value;
  s.policy = Policy::parse(policy_name);
  s.technologies = spec.technologies;
  const std::string& var = spec.sweep.variable;
  if (var == "beta_db") {
    for (auto& t : s.technologies) t.beta = db_to_linear(value);
  } else if (var == "alpha") {
    for (auto& t : s.technologies) t.alpha = value;
  } else if (var == "T") {
    s.technologies = replicate(spec.technologies.front(), static_cast<std::size_t>(value));
  } else if (var == "k") {
    if (s.policy.kind == PolicyKind::opt_coverage || s.policy.kind == PolicyKind::opt_rate) {
      s.policy.k = static_cast<std::size_t>(value);
    }
  }
  return s;
}

std::string describe(const Scenario& s, const std::string& var) {
  std::string out = s.policy.name();
  if (var != "none") out += " at " + var + "=" + format_number(s.sweep_value);
  return out;
}

}  // namespace

std::string to_string(Engine e) {
  switch (e) {
    case Engine::analytic: return "analytic";
    case Engine::monte_carlo: return "monte-carlo";
    case Engine::both: return "both";
  }
  return "unknown";
}

namespace {
std::string join(const std::vector<std::string>& parts) {
  std::string out = "invalid experiment spec:";
  for (const auto& p : parts) out += "\n  " + p;
  return out;
}
}  // namespace

SpecError::SpecError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

ExperimentSpec parse_spec(const json& doc) {
  std::vector<std::string> problems;
  ExperimentSpec spec;
  if (!doc.is_object()) throw SpecError({"spec must be a JSON object"});
  FieldReader top(doc, "", problems);

  if (auto v = top.get<std::string>("name")) spec.name = *v;

  if (!doc.contains("technologies") || !doc["technologies"].is_array()) {
    problems.push_back("technologies: required array");
  } else {
    top.get<json>("technologies");
    std::size_t index = 0;
    for (const auto& entry : doc["technologies"]) {
      const std::string where = "technologies[" + std::to_string(index++) + "].";
      if (!entry.is_object()) {
        problems.push_back(where.substr(0, where.size() - 1) + ": must be an object");
        continue;
      }
      FieldReader r(entry, where, problems);
      TechnologyConfig cfg;
      if (auto v = r.get<double>("lambda")) cfg.lambda = *v;
      else problems.push_back(where + "lambda: required");
      if (auto v = r.get<double>("power")) cfg.power = *v;
      if (auto v = r.get<double>("noise")) cfg.noise = *v;
      if (auto v = r.get<double>("alpha")) cfg.alpha = *v;
      if (auto v = r.get<double>("mu")) cfg.fading_mean_inv = *v;
      if (auto v = r.get<double>("bandwidth")) cfg.bandwidth = *v;
      const auto beta = r.get<double>("beta");
      const auto beta_db = r.get<double>("beta_db");
      if (beta && beta_db) problems.push_back(where + "beta: give either beta or beta_db");
      if (beta) cfg.beta = *beta;
      if (beta_db) cfg.beta = db_to_linear(*beta_db);
      std::size_t count = 1;
      if (auto v = r.get<long long>("count")) {
        if (*v < 1) problems.push_back(where + "count: must be >= 1");
        else count = static_cast<std::size_t>(*v);
      }
      r.reject_unknown();
      for (std::size_t c = 0; c < count; ++c) spec.technologies.push_back(cfg);
    }
    for (std::size_t i = 0; i < spec.technologies.size(); ++i) spec.technologies[i].id = i + 1;
  }

  if (auto v = top.get<std::vector<std::string>>("policies")) spec.policies = *v;
  else if (!doc.contains("policies")) problems.push_back("policies: required list");

  if (auto v = top.get<std::string>("metric")) {
    try {
      spec.metric = parse_metric(*v);
    } catch (const ArgumentError& e) {
      problems.push_back(std::string("metric: ") + e.what());
    }
  }

  if (doc.contains("sweep")) {
    top.get<json>("sweep");
    const auto& s = doc["sweep"];
    if (!s.is_object()) {
      problems.push_back("sweep: must be an object");
    } else {
      FieldReader r(s, "sweep.", problems);
      if (auto v = r.get<std::string>("variable")) spec.sweep.variable = *v;
      else problems.push_back("sweep.variable: required");
      if (auto v = r.get<std::vector<double>>("values")) spec.sweep.values = *v;
      if (spec.sweep.values.empty()) problems.push_back("sweep.values: must not be empty");
      r.reject_unknown();
    }
  }

  if (auto v = top.get<std::string>("engine")) {
    if (*v == "analytic") spec.engine = Engine::analytic;
    else if (*v == "monte-carlo") spec.engine = Engine::monte_carlo;
    else if (*v == "both") spec.engine = Engine::both;
    else problems.push_back("engine: expected analytic, monte-carlo or both");
  }
  if (auto v = top.get<long long>("n_worlds")) {
    if (*v < 0) problems.push_back("n_worlds: must be positive");
    else spec.n_worlds = static_cast<std::size_t>(*v);
  }
  if (auto v = top.get<std::uint64_t>("seed")) spec.seed = *v;
  if (auto v = top.get<long long>("bs_count")) {
    if (*v < 0) problems.push_back("bs_count: must be positive");
    else spec.bs_count = static_cast<std::size_t>(*v);
  }
  if (auto v = top.get<bool>("tail_correction")) spec.tail_correction = *v;
  if (auto v = top.get<long long>("workers")) {
    if (*v < 0) problems.push_back("workers: must be >= 0");
    else spec.workers = static_cast<std::size_t>(*v);
  }
  if (auto v = top.get<std::string>("output")) spec.output = *v;
  top.reject_unknown();

  if (!problems.empty()) throw SpecError(std::move(problems));
  validate(spec);
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError({"cannot read spec file '" + path + "'"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError({std::string("spec is not valid JSON: ") + e.what()});
  }
  return parse_spec(doc);
}

json to_json(const ExperimentSpec& spec) {
  json techs = json::array();
  for (const auto& t : spec.technologies) {
    techs.push_back({{"lambda", t.lambda},
                     {"power", t.power},
                     {"noise", t.noise},
                     {"alpha", t.alpha},
                     {"beta", t.beta},
                     {"mu", t.fading_mean_inv},
                     {"bandwidth", t.bandwidth}});
  }
  json doc = {{"name", spec.name},
              {"technologies", techs},
              {"policies", spec.policies},
              {"metric", to_string(spec.metric)},
              {"engine", to_string(spec.engine)},
              {"n_worlds", spec.n_worlds},
              {"seed", spec.seed},
              {"bs_count", spec.bs_count},
              {"tail_correction", spec.tail_correction},
              {"workers", spec.workers}};
  if (spec.sweep.variable != "none") {
    doc["sweep"] = {{"variable", spec.sweep.variable}, {"values", spec.sweep.values}};
  }
  if (!spec.output.empty()) doc["output"] = spec.output;
  return doc;
}

void validate(const ExperimentSpec& spec) {
  std::vector<std::string> problems;
  if (spec.technologies.empty()) problems.push_back("technologies: at least one is required");
  for (std::size_t i = 0; i < spec.technologies.size(); ++i) {
    try {
      spec.technologies[i].validate();
    } catch (const std::exception& e) {
      problems.push_back("technologies[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (spec.policies.empty()) problems.push_back("policies: at least one is required");
  bool policies_ok = true;
  for (const auto& p : spec.policies) {
    try {
      Policy::parse(p).validate();
    } catch (const std::exception& e) {
      problems.push_back(std::string("policies: ") + e.what());
      policies_ok = false;
    }
  }

  const std::string& var = spec.sweep.variable;
  if (!kSweepVariables.contains(var)) {
    problems.push_back("sweep.variable: expected one of beta_db, alpha, T, k");
  } else if (var != "none") {
    if (spec.sweep.values.empty()) problems.push_back("sweep.values: must not be empty");
    for (double v : spec.sweep.values) {
      if (!std::isfinite(v)) problems.push_back("sweep.values: must be finite");
      if (var == "alpha" && !(v > 2.0)) problems.push_back("sweep.values: alpha must be > 2");
      if ((var == "T" || var == "k") && !is_positive_integer(v)) {
        problems.push_back("sweep.values: " + var + " values must be positive integers");
      }
      if (var == "k" && v > static_cast<double>(spec.bs_count)) {
        problems.push_back("sweep.values: k exceeds bs_count");
      }
    }
    if (var == "T") {
      for (const auto& t : spec.technologies) {
        if (!same_law(t, spec.technologies.front())) {
          problems.push_back("sweep: a T sweep needs identical technologies (used as template)");
          break;
        }
      }
    }
  }

  if (spec.bs_count < 2) problems.push_back("bs_count: must be >= 2");
  if (spec.engine != Engine::analytic && spec.n_worlds < 100) {
    problems.push_back("n_worlds: must be >= 100");
  }

  if (problems.empty() && policies_ok) {
    for (const auto& s : expand(spec)) {
      if (s.policy.depth() > spec.bs_count) {
        problems.push_back("bs_count: " + s.policy.name() + " needs " +
                           std::to_string(s.policy.depth()) + " distances");
      }
      if (spec.engine == Engine::analytic) {
        if (auto reason = analytic_unavailable_reason(s.policy, spec.metric, s.technologies)) {
          problems.push_back("engine: no analytic expression for " + describe(s, var) + " (" +
                             *reason + ")");
        }
      }
    }
  }
  if (!problems.empty()) throw SpecError(std::move(problems));
}

std::vector<Scenario> expand(const ExperimentSpec& spec) {
  std::vector<double> points = spec.sweep.values;
  if (spec.sweep.variable == "none") points = {0.0};
  std::vector<Scenario> out;
  for (double v : points) {
    for (const auto& p : spec.policies) out.push_back(apply(spec, p, v));
  }
  return out;
}

RunResult run(const ExperimentSpec& spec) {
  validate(spec);
  RunResult result;
  result.scenarios = expand(spec);
  const auto& scenarios = result.scenarios;
  const std::string& var = spec.sweep.variable;
  const bool want_analytic = spec.engine != Engine::monte_carlo;
  const bool want_mc = spec.engine != Engine::analytic;

  std::vector<bool> attempted(scenarios.size(), false);
  result.analytic.assign(scenarios.size(), std::nullopt);
  if (want_analytic) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const auto& s = scenarios[i];
      if (auto reason = analytic_unavailable_reason(s.policy, spec.metric, s.technologies)) {
        result.notes.push_back("analytic skipped for " + describe(s, var) + ": " + *reason);
        continue;
      }
      attempted[i] = true;
      try {
        result.analytic[i] = analytic_performance(s.policy, spec.metric, s.technologies);
      } catch (const QuadratureError& e) {
        result.numerical_failure = true;
        result.notes.push_back("analytic failed for " + describe(s, var) + ": " + e.what());
      }
    }
  }

  if (want_mc) {
    std::vector<Arm> arms;
    for (const auto& s : scenarios) arms.push_back({s.policy, spec.metric, s.technologies});
    MonteCarloSpec mc;
    mc.n_worlds = spec.n_worlds;
    mc.sampler.bs_count = spec.bs_count;
    mc.sampler.seed = spec.seed;
    mc.sampler.tail_correction = spec.tail_correction;
    mc.workers = spec.workers;
    result.monte_carlo = estimate_batch(arms, mc);
  }

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ResultRow base;
    base.sweep_var = var;
    if (var != "none") base.sweep_value = scenarios[i].sweep_value;
    base.policy = scenarios[i].policy.name();
    base.metric = spec.metric;
    if (attempted[i]) {
      ResultRow row = base;
      row.engine = Method::analytic;
      row.failed = !result.analytic[i].has_value();
      row.value = result.analytic[i].value_or(std::nan(""));
      result.rows.push_back(row);
    }
    if (want_mc) {
      const auto& e = (*result.monte_carlo)[i];
      ResultRow row = base;
      row.engine = Method::monte_carlo;
      row.value = e.value;
      row.ci95 = e.half_width_95;
      row.n = e.n_samples;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "sweep_var,sweep_value,policy,engine,metric,value,ci95,n\n";
  for (const auto& r : rows) {
    out << r.sweep_var << ',' << (r.sweep_value ? format_number(*r.sweep_value) : "") << ','
        << r.policy << ',' << to_string(r.engine) << ',' << to_string(r.metric) << ','
        << (r.failed ? "nan" : format_number(r.value)) << ','
        << (r.ci95 ? format_number(*r.ci95) : "") << ',' << r.n << '\n';
  }
}

json sidecar(const ExperimentSpec& spec, const RunResult& result) {
  return {{"spec", to_json(spec)},
          {"seed", spec.seed},
          {"rows", result.rows.size()},
          {"columns", {"sweep_var", "sweep_value", "policy", "engine", "metric", "value", "ci95", "n"}},
          {"notes", result.notes},
          {"numerical_failure", result.numerical_failure}};
}

}  // namespace cellassoc::cli
