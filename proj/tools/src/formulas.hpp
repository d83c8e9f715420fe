#pragma once

#include <map>
#include <string>
#include <vector>

namespace cellassoc::cli {

/// Names accepted by `analytic <formula>`.
const std::vector<std::string>& formula_names();

/// Parses `key=value` tokens; throws ArgumentError on malformed input.
std::map<std::string, double> parse_params(const std::vector<std::string>& tokens);

/// Evaluates one named expression. Technology parameters default to lambda = 1/pi,
/// alpha = 4, beta = 1, N0 = 0, P = 1, mu = 1, B = 1; `beta_db` may replace `beta`.
/// Unknown or missing parameters raise ArgumentError.
double evaluate_formula(const std::string& name, const std::map<std::string, double>& params);

/// One line of usage per formula.
std::string formula_help();

}  // namespace cellassoc::cli
