#include "cellassoc/sampling.hpp"

#include <cmath>
#include <numbers>

namespace cellassoc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block)
    : engine_(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ block)) {}

double RandomStream::exponential(double rate) {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform()) / rate;
}

std::size_t RandomStream::below(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

void SamplerSpec::validate() const {
  if (bs_count < 2) throw ArgumentError("bs_count must be >= 2");
}

std::vector<double> sample_distances(double lambda, std::size_t count, RandomStream& rng) {
  if (!(lambda > 0.0)) throw ArgumentError("lambda must be > 0");
  std::vector<double> r(count);
  const double rate = lambda * std::numbers::pi;
  double squared = 0.0;
  for (auto& rj : r) {
    double gap = rng.exponential(rate);
    // A zero gap would break strict ordering; it has probability ~2^-53 per draw.
    while (!(gap > 0.0)) gap = rng.exponential(rate);
    squared += gap;
    rj = std::sqrt(squared);
  }
  return r;
}

std::vector<double> sample_fading(double mu, std::size_t count, RandomStream& rng) {
  if (!(mu > 0.0)) throw ArgumentError("fading rate mu must be > 0");
  std::vector<double> h(count);
  for (auto& hj : h) {
    hj = rng.exponential(mu);
    while (!(hj > 0.0)) hj = rng.exponential(mu);
  }
  return h;
}

double tail_interference_mean(double lambda, double alpha, double r_last, double mu) {
  if (!(alpha > 2.0)) throw DivergenceError("tail interference diverges for alpha <= 2");
  if (!(r_last > 0.0)) throw ArgumentError("r_last must be > 0");
  return (1.0 / mu) * 2.0 * std::numbers::pi * lambda * std::pow(r_last, 2.0 - alpha) /
         (alpha - 2.0);
}

NetworkRealization sample_realization(std::span<const TechnologyConfig> configs,
                                      const SamplerSpec& spec, RandomStream& rng) {
  if (configs.empty()) throw ArgumentError("at least one technology is required");
  std::vector<TechnologyRealization> per_tech;
  per_tech.reserve(configs.size());
  for (const auto& cfg : configs) {
    auto r = sample_distances(cfg.lambda, spec.bs_count, rng);
    auto h = sample_fading(cfg.fading_mean_inv, spec.bs_count, rng);
    const double tail =
        spec.tail_correction
            ? tail_interference_mean(cfg.lambda, cfg.alpha, r.back(), cfg.fading_mean_inv)
            : 0.0;
    per_tech.emplace_back(std::move(r), std::move(h), tail);
  }
  return NetworkRealization(std::move(per_tech));
}

}  // namespace cellassoc
