#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellassoc/montecarlo.hpp"
#include "json.hpp"

namespace cellassoc::cli {

enum class Engine { analytic, monte_carlo, both };
std::string to_string(Engine e);

struct Sweep {
  std::string variable = "none";  ///< none, beta_db, alpha, T or k
  std::vector<double> values;
};

struct ExperimentSpec {
  std::string name = "experiment";
  std::vector<TechnologyConfig> technologies;
  std::vector<std::string> policies;
  Metric metric = Metric::coverage;
  Sweep sweep;
  Engine engine = Engine::both;
  std::size_t n_worlds = 10000;
  std::uint64_t seed = 1;
  std::size_t bs_count = 64;
  bool tail_correction = true;
  std::size_t workers = 1;
  std::string output;  ///< CSV path; empty writes to stdout
};

/// Invalid experiment description; carries one message per offending field.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

ExperimentSpec parse_spec(const nlohmann::json& doc);
ExperimentSpec load_spec(const std::string& path);
nlohmann::json to_json(const ExperimentSpec& spec);

/// Throws SpecError listing every problem found.
void validate(const ExperimentSpec& spec);

/// One evaluated scenario: technologies and policy after applying a sweep value.
struct Scenario {
  double sweep_value = 0.0;
  Policy policy;
  std::vector<TechnologyConfig> technologies;
};

/// Scenarios in output order: sweep point major, policy minor.
std::vector<Scenario> expand(const ExperimentSpec& spec);

struct ResultRow {
  std::string sweep_var;
  std::optional<double> sweep_value;
  std::string policy;
  Method engine = Method::monte_carlo;
  Metric metric = Metric::coverage;
  double value = 0.0;
  std::optional<double> ci95;
  std::size_t n = 0;
  bool failed = false;
};

struct RunResult {
  std::vector<Scenario> scenarios;
  std::vector<ResultRow> rows;
  /// Monte Carlo estimates, one arm per scenario (empty for engine=analytic).
  std::optional<BatchResult> monte_carlo;
  /// Analytic values per scenario; nullopt where no expression exists or it failed.
  std::vector<std::optional<double>> analytic;
  std::vector<std::string> notes;  ///< skipped or failed analytic evaluations
  bool numerical_failure = false;
};

/// Evaluates every scenario. All Monte Carlo arms share one sequence of worlds.
RunResult run(const ExperimentSpec& spec);

/// Fixed column order: sweep_var,sweep_value,policy,engine,metric,value,ci95,n.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Resolved spec, seed and notes of a run.
nlohmann::json sidecar(const ExperimentSpec& spec, const RunResult& result);

/// "%.9g" formatting used for every float in the CSV output.
std::string format_number(double x);

}  // namespace cellassoc::cli
