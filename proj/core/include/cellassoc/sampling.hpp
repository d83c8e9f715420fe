#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cellassoc/types.hpp"

namespace cellassoc {

/// Pseudo-random stream: std::mt19937_64 seeded through SplitMix64 from a
/// (seed, stream, block) triple. Uniforms use the top 53 bits of each draw, so the
/// sequence depends only on the engine, not on the standard library's distributions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t block = 0);

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate);
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Truncation and reproducibility settings for world sampling.
struct SamplerSpec {
  std::size_t bs_count = 64;   ///< J nearest base stations sampled per technology
  std::uint64_t seed = 1;
  bool tail_correction = true; ///< add the mean interference beyond r_J

  void validate() const;
};

/// Ordered distances to the nearest `count` points of a homogeneous PPP of
/// intensity `lambda` seen from the origin: r_j^2 is a sum of j i.i.d.
/// exponentials with mean 1/(lambda*pi).
std::vector<double> sample_distances(double lambda, std::size_t count, RandomStream& rng);

/// i.i.d. exponential fading marks with mean 1/mu.
std::vector<double> sample_fading(double mu, std::size_t count, RandomStream& rng);

/// Mean of sum_{r > r_last} H r^-alpha over the PPP (Campbell):
/// (1/mu) * 2*pi*lambda * r_last^(2-alpha) / (alpha-2).
double tail_interference_mean(double lambda, double alpha, double r_last, double mu);

/// Independent per-technology draws, in config order (distances then fading).
NetworkRealization sample_realization(std::span<const TechnologyConfig> configs,
                                      const SamplerSpec& spec, RandomStream& rng);

}  // namespace cellassoc
