#pragma once

#include <cstddef>
#include <span>

#include "cellassoc/types.hpp"

namespace cellassoc {

/// SINR at the origin when served by the `bs_rank`-th nearest base station of
/// technology `tech` (both 1-based). Interference is every other sampled base
/// station of the same technology plus the realization's mean tail term.
double sinr(const NetworkRealization& world, const TechnologyConfig& cfg, std::size_t tech,
            std::size_t bs_rank);

double sinr(const TechnologyRealization& tech, const TechnologyConfig& cfg, std::size_t bs_rank);

/// 1 iff s >= beta.
inline int coverage_value(double s, double beta) { return s >= beta ? 1 : 0; }

/// B * log2(1 + s).
double rate_value(double s, double bandwidth = 1.0);

}  // namespace cellassoc
