#include "cellassoc/types.hpp"

#include <cmath>
#include <string>

namespace cellassoc {

void TechnologyConfig::validate() const {
  auto require = [&](bool ok, const char* what) {
    if (!ok) {
      throw ArgumentError("technology " + std::to_string(id) + ": " + what);
    }
  };
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be > 0");
  require(std::isfinite(power) && power > 0.0, "power must be > 0");
  require(std::isfinite(noise) && noise >= 0.0, "noise must be >= 0");
  require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
  require(std::isfinite(fading_mean_inv) && fading_mean_inv > 0.0,
          "fading_mean_inv must be > 0");
  require(std::isfinite(bandwidth) && bandwidth >= 0.0, "bandwidth must be >= 0");
  if (!(std::isfinite(alpha) && alpha > 2.0)) {
    throw DivergenceError("technology " + std::to_string(id) +
                          ": alpha must be > 2 for finite interference");
  }
}

bool same_law(const TechnologyConfig& a, const TechnologyConfig& b) {
  return a.lambda == b.lambda && a.power == b.power && a.noise == b.noise &&
         a.alpha == b.alpha && a.beta == b.beta &&
         a.fading_mean_inv == b.fading_mean_inv && a.bandwidth == b.bandwidth;
}

std::vector<TechnologyConfig> replicate(const TechnologyConfig& base, std::size_t count) {
  std::vector<TechnologyConfig> out(count, base);
  for (std::size_t i = 0; i < count; ++i) out[i].id = i + 1;
  return out;
}

TechnologyRealization::TechnologyRealization(std::vector<double> distances,
                                             std::vector<double> fading, double tail_mean)
    : distances_(std::move(distances)), fading_(std::move(fading)), tail_mean_(tail_mean) {
  if (distances_.size() < 2) {
    throw ArgumentError("a technology realization needs at least 2 base stations");
  }
  if (distances_.size() != fading_.size()) {
    throw ArgumentError("distances and fading marks must have equal length");
  }
  if (!(distances_.front() > 0.0)) {
    throw ArgumentError("distances must be positive");
  }
  for (std::size_t j = 1; j < distances_.size(); ++j) {
    if (!(distances_[j] > distances_[j - 1])) {
      throw ArgumentError("distances must be strictly increasing");
    }
  }
  for (double h : fading_) {
    // Zero marks are allowed so that a silenced link can be represented.
    if (!(h >= 0.0) || !std::isfinite(h)) throw ArgumentError("fading marks must be >= 0");
  }
  if (!(tail_mean_ >= 0.0)) throw ArgumentError("tail_mean must be >= 0");
}

NetworkRealization::NetworkRealization(std::vector<TechnologyRealization> per_tech)
    : per_tech_(std::move(per_tech)) {
  if (per_tech_.empty()) throw ArgumentError("a network needs at least one technology");
}

const TechnologyRealization& NetworkRealization::technology(std::size_t tech) const {
  if (tech < 1 || tech > per_tech_.size()) {
    throw ArgumentError("technology index " + std::to_string(tech) + " out of range");
  }
  return per_tech_[tech - 1];
}

Observation observe(const NetworkRealization& world, std::size_t tech, std::size_t k) {
  const auto& t = world.technology(tech);
  if (k < 1 || k > t.size()) {
    throw ArgumentError("observation depth " + std::to_string(k) + " exceeds realization");
  }
  return Observation{tech, t.distances().first(k)};
}

std::string to_string(Metric m) { return m == Metric::coverage ? "coverage" : "rate"; }

Metric parse_metric(const std::string& text) {
  if (text == "coverage") return Metric::coverage;
  if (text == "rate") return Metric::rate;
  throw ArgumentError("unknown metric '" + text + "' (expected coverage or rate)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace cellassoc
