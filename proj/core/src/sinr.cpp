#include "cellassoc/sinr.hpp"

#include <cmath>
#include <string>

namespace cellassoc {

double sinr(const TechnologyRealization& tech, const TechnologyConfig& cfg, std::size_t bs_rank) {
  if (bs_rank < 1 || bs_rank > tech.size()) {
    throw ArgumentError("base-station rank " + std::to_string(bs_rank) + " out of range");
  }
  const auto r = tech.distances();
  const auto h = tech.fading();
  const std::size_t serving = bs_rank - 1;

  double signal = 0.0;
  double interference = tech.tail_mean();
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double rx = h[k] * std::pow(r[k], -cfg.alpha);
    if (k == serving) {
      signal = rx;
    } else {
      interference += rx;
    }
  }
  // P cancels between signal and interference; only the noise term sees it.
  return signal / (cfg.noise / cfg.power + interference);
}

double sinr(const NetworkRealization& world, const TechnologyConfig& cfg, std::size_t tech,
            std::size_t bs_rank) {
  return sinr(world.technology(tech), cfg, bs_rank);
}

double rate_value(double s, double bandwidth) { return bandwidth * std::log2(1.0 + s); }

}  // namespace cellassoc
