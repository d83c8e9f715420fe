#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellassoc {

/// Thrown when an argument violates a documented precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an interference integral does not converge (path-loss exponent <= 2).
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameters of one radio technology: an independent Poisson deployment of base
/// stations on its own bandwidth. All quantities are linear scale.
struct TechnologyConfig {
  std::size_t id = 1;            ///< 1-based technology index
  double lambda = 0.0;           ///< base-station density per unit area
  double power = 1.0;            ///< transmit power P
  double noise = 0.0;            ///< thermal noise N0
  double alpha = 4.0;            ///< path-loss exponent, l(r) = r^-alpha
  double beta = 1.0;             ///< SINR coverage threshold
  double fading_mean_inv = 1.0;  ///< mu: Rayleigh fading power ~ Exp(mean 1/mu)
  double bandwidth = 1.0;        ///< rate weight B in B*log2(1+SINR)

  /// Throws ArgumentError (or DivergenceError for alpha <= 2) on invalid fields.
  void validate() const;

  friend bool operator==(const TechnologyConfig&, const TechnologyConfig&) = default;
};

/// Same parameters except `id`; technologies that are statistically identical.
bool same_law(const TechnologyConfig& a, const TechnologyConfig& b);

/// `count` copies of `base`, renumbered 1..count.
std::vector<TechnologyConfig> replicate(const TechnologyConfig& base, std::size_t count);

/// Ordered distances and fading marks of the J nearest base stations of one
/// technology, plus the mean interference of everything beyond r_J (normalized by P).
class TechnologyRealization {
 public:
  TechnologyRealization(std::vector<double> distances, std::vector<double> fading,
                        double tail_mean);

  std::span<const double> distances() const { return distances_; }
  std::span<const double> fading() const { return fading_; }
  double tail_mean() const { return tail_mean_; }
  std::size_t size() const { return distances_.size(); }

 private:
  std::vector<double> distances_;
  std::vector<double> fading_;
  double tail_mean_;
};

/// One sampled world: a realization per technology, index-aligned with the configs.
class NetworkRealization {
 public:
  explicit NetworkRealization(std::vector<TechnologyRealization> per_tech);

  std::size_t technology_count() const { return per_tech_.size(); }
  /// 1-based technology index.
  const TechnologyRealization& technology(std::size_t tech) const;
  std::span<const TechnologyRealization> technologies() const { return per_tech_; }

 private:
  std::vector<TechnologyRealization> per_tech_;
};

/// What the UE knows about one technology: its k nearest distances.
struct Observation {
  std::size_t technology = 1;
  std::span<const double> distances;

  std::size_t depth() const { return distances.size(); }
};

/// Observation of depth k taken from a realization (k <= J).
Observation observe(const NetworkRealization& world, std::size_t tech, std::size_t k);

/// Chosen technology and base-station rank, both 1-based. Implemented policies
/// always serve from the nearest base station of the chosen technology.
struct PolicyDecision {
  std::size_t technology = 1;
  std::size_t bs_rank = 1;

  friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

/// Performance function applied to the SINR of the served link.
enum class Metric { coverage, rate };

std::string to_string(Metric m);
Metric parse_metric(const std::string& text);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace cellassoc
