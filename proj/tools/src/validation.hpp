#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cellassoc/types.hpp"

namespace cellassoc::cli {

enum class CheckStatus { pass, fail, skipped };
std::string to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double observed = 0.0;
  double required = 0.0;  ///< tolerance or bound the observation is compared with
  std::string detail;
};

/// Two-distance conditional coverage, replaceable for sensitivity testing.
using TwoDistanceKernel = std::function<double(double r1, double r2, const TechnologyConfig&)>;

struct ValidateOptions {
  bool quick = false;
  std::size_t n_worlds = 0;  ///< 0 picks 10^5 (10^4 with quick)
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  TwoDistanceKernel two_distance;  ///< empty uses the library kernel
};

/// Statistical checks need at least this many worlds; below it they are skipped.
inline constexpr std::size_t kMinStatisticalWorlds = 10000;

/// Cross-validation suite: specialization identities, analytic versus Monte
/// Carlo agreement and sampled-law KS tests.
std::vector<CheckResult> run_validation(const ValidateOptions& options);

bool all_passed(const std::vector<CheckResult>& checks);

/// Columns: check,status,observed,required,detail.
void write_report_csv(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace cellassoc::cli
