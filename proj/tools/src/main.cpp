#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "figures.hpp"
#include "formulas.hpp"
#include "validation.hpp"

namespace {

using namespace cellassoc;
using namespace cellassoc::cli;

enum Exit { kOk = 0, kValidationFailure = 1, kNumericalFailure = 2, kBadArguments = 3 };

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out << text;
}

std::string csv_text(const RunResult& result) {
  std::ostringstream os;
  write_csv(os, result.rows);
  return os.str();
}

// Writes <csv> and its JSON sidecar <csv minus extension>.json.
void write_outputs(const std::filesystem::path& csv, const ExperimentSpec& spec,
                   const RunResult& result) {
  write_text(csv, csv_text(result));
  auto json_path = csv;
  json_path.replace_extension(".json");
  write_text(json_path, sidecar(spec, result).dump(2) + "\n");
}

void report_notes(const RunResult& result) {
  for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
}

int run_command(const std::string& spec_path, const std::string& out,
                std::optional<std::size_t> n_worlds, std::optional<std::uint64_t> seed,
                std::optional<std::size_t> workers) {
  auto spec = load_spec(spec_path);
  if (n_worlds) spec.n_worlds = *n_worlds;
  if (seed) spec.seed = *seed;
  if (workers) spec.workers = *workers;
  if (!out.empty()) spec.output = out;
  const auto result = run(spec);
  report_notes(result);
  if (spec.output.empty()) {
    std::cout << csv_text(result);
  } else {
    write_outputs(spec.output, spec, result);
  }
  return result.numerical_failure ? kNumericalFailure : kOk;
}

int figure_command(const std::string& id, const std::string& out_dir,
                   std::optional<std::size_t> n_worlds, std::optional<std::uint64_t> seed,
                   std::size_t workers) {
  bool failed = false;
  for (const auto& fig : figure_runs(id, n_worlds, seed, workers)) {
    const auto result = run(fig.spec);
    report_notes(result);
    const auto csv = std::filesystem::path(out_dir) / (fig.name + ".csv");
    write_outputs(csv, fig.spec, result);
    std::cerr << "wrote " << csv.string() << '\n';
    failed = failed || result.numerical_failure;
  }
  return failed ? kNumericalFailure : kOk;
}

int validate_command(const ValidateOptions& options, const std::string& out_dir) {
  const auto checks = run_validation(options);
  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& c : checks) {
    std::printf("%-8s %-48s observed=%-14s required=%s\n", to_string(c.status).c_str(),
                c.name.c_str(), format_number(c.observed).c_str(),
                format_number(c.required).c_str());
    if (c.status == CheckStatus::pass) ++passed;
    else if (c.status == CheckStatus::fail) ++failed;
    else ++skipped;
  }
  std::printf("%zu passed, %zu failed, %zu skipped\n", passed, failed, skipped);
  if (!out_dir.empty()) {
    std::ostringstream os;
    write_report_csv(os, checks);
    write_text(std::filesystem::path(out_dir) / "validate.csv", os.str());
  }
  return all_passed(checks) ? kOk : kValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-technology cell association: analytic and Monte Carlo evaluation"};
  app.require_subcommand(1);

  std::optional<std::size_t> n_worlds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON spec");
  std::string spec_path, run_out;
  run_cmd->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "CSV output path (overrides the spec; default stdout)");
  run_cmd->add_option("--n-worlds", n_worlds, "Monte Carlo worlds");
  run_cmd->add_option("--seed", seed, "Random seed");
  run_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* fig_cmd = app.add_subcommand("figure", "Reproduce one of the canned simulation studies");
  std::string fig_id, fig_out = ".";
  fig_cmd->add_option("id", fig_id, "fig2, fig3-cov, fig3-rate or fig4")->required();
  fig_cmd->add_option("--out", fig_out, "Output directory");
  fig_cmd->add_option("--n-worlds", n_worlds, "Monte Carlo worlds");
  fig_cmd->add_option("--seed", seed, "Random seed");
  fig_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* val_cmd = app.add_subcommand("validate", "Cross-validate analytic and Monte Carlo paths");
  ValidateOptions vopts;
  std::string val_out;
  val_cmd->add_flag("--quick", vopts.quick, "Use 10^4 worlds instead of 10^5");
  val_cmd->add_option("--n-worlds", n_worlds, "Monte Carlo worlds");
  val_cmd->add_option("--seed", seed, "Random seed");
  val_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
  val_cmd->add_option("--out", val_out, "Directory for validate.csv");

  auto* an_cmd = app.add_subcommand("analytic", "Evaluate one named expression");
  std::string formula;
  std::vector<std::string> params;
  an_cmd->add_option("formula", formula, "Expression name")->required();
  an_cmd->add_option("--params", params, "key=value pairs");
  an_cmd->footer("Formulas:\n" + formula_help());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*run_cmd) return run_command(spec_path, run_out, n_worlds, seed, workers);
    if (*fig_cmd) return figure_command(fig_id, fig_out, n_worlds, seed, workers.value_or(1));
    if (*val_cmd) {
      if (n_worlds) vopts.n_worlds = *n_worlds;
      if (seed) vopts.seed = *seed;
      vopts.workers = workers.value_or(1);
      return validate_command(vopts, val_out);
    }
    if (*an_cmd) {
      std::printf("%s\n", format_number(evaluate_formula(formula, parse_params(params))).c_str());
      return kOk;
    }
  } catch (const SpecError& e) {
    std::cerr << e.what() << '\n';
    return kValidationFailure;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  }
  return kBadArguments;
}
