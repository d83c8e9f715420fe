#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace cellassoc::cli {

/// One table of a figure; fig3-cov has one per technology count.
struct FigureRun {
  std::string name;
  ExperimentSpec spec;
};

const std::vector<std::string>& figure_ids();

/// Canned experiments. Defaults: lambda = 1/pi, N0 = 0, alpha = 4, beta = 0 dB.
/// Throws ArgumentError for an unknown id.
std::vector<FigureRun> figure_runs(const std::string& id,
                                   std::optional<std::size_t> n_worlds = std::nullopt,
                                   std::optional<std::uint64_t> seed = std::nullopt,
                                   std::size_t workers = 1);

/// The base technology used by every figure.
TechnologyConfig figure_technology();

}  // namespace cellassoc::cli
