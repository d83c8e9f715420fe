#include "cellassoc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "cellassoc/sinr.hpp"

namespace cellassoc {
namespace {

constexpr std::uint64_t kWorldStream = 0;
constexpr std::uint64_t kDecisionStream = 1;

std::size_t worker_count(const MonteCarloSpec& spec, std::size_t blocks) {
  std::size_t w = spec.workers;
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return std::min(w, blocks);
}

// Runs fn(block, first_world, count) for every block and returns the results in
// block order, whatever the thread interleaving.
template <class Result, class Fn>
std::vector<Result> run_blocks(const MonteCarloSpec& spec, Fn fn) {
  const std::size_t blocks = (spec.n_worlds + spec.block_size - 1) / spec.block_size;
  std::vector<Result> results(blocks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      const std::size_t first = b * spec.block_size;
      const std::size_t count = std::min(spec.block_size, spec.n_worlds - first);
      try {
        results[b] = fn(b, count);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  const std::size_t workers = worker_count(spec, blocks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

struct BlockSums {
  std::vector<double> sums;
  std::vector<double> cross;
};

std::size_t packed_index(std::size_t a, std::size_t b, std::size_t n) {
  if (a > b) std::swap(a, b);
  return a * n - a * (a - 1) / 2 + (b - a);
}

PerformanceEstimate summarize(double sum, double sum_sq, std::size_t n, Metric metric) {
  PerformanceEstimate e;
  e.metric = metric;
  e.method = Method::monte_carlo;
  e.n_samples = n;
  const double nn = static_cast<double>(n);
  e.value = sum / nn;
  if (metric == Metric::coverage) {
    const auto successes = static_cast<std::size_t>(std::llround(sum));
    std::tie(e.ci_low, e.ci_high) = wilson_interval(successes, n);
    e.standard_error = std::sqrt(e.value * (1.0 - e.value) / nn);
    e.half_width_95 = 0.5 * (e.ci_high - e.ci_low);
  } else {
    const auto [mean, half] = t_interval(sum, sum_sq, n);
    e.half_width_95 = half;
    e.ci_low = mean - half;
    e.ci_high = mean + half;
    const double var = std::max(0.0, (sum_sq - sum * sum / nn) / (nn - 1.0));
    e.standard_error = std::sqrt(var / nn);
  }
  return e;
}

// Served-link powers of one technology under one path-loss exponent, all
// normalized by the transmit power.
struct LinkPowers {
  double signal = 0.0;
  double interference = 0.0;  // sampled interferers plus the mean tail
};

LinkPowers link_powers(const TechnologyRealization& t, const TechnologyConfig& law, double alpha,
                       bool tail_correction) {
  const auto r = t.distances();
  const auto h = t.fading();
  LinkPowers p;
  p.signal = h[0] * std::pow(r[0], -alpha);
  for (std::size_t k = 1; k < r.size(); ++k) p.interference += h[k] * std::pow(r[k], -alpha);
  if (tail_correction) {
    p.interference += tail_interference_mean(law.lambda, alpha, r.back(), law.fading_mean_inv);
  }
  return p;
}

}  // namespace

std::string to_string(Method m) { return m == Method::monte_carlo ? "monte-carlo" : "analytic"; }

PerformanceEstimate analytic_estimate(double value, Metric metric) {
  PerformanceEstimate e;
  e.value = value;
  e.ci_low = value;
  e.ci_high = value;
  e.method = Method::analytic;
  e.metric = metric;
  return e;
}

void MonteCarloSpec::validate() const {
  if (n_worlds < 100) throw ArgumentError("n_worlds must be >= 100");
  if (block_size == 0) throw ArgumentError("block_size must be positive");
  sampler.validate();
}

BatchResult::BatchResult(std::vector<PerformanceEstimate> estimates, std::vector<double> sums,
                         std::vector<double> cross, std::size_t n)
    : estimates_(std::move(estimates)), sums_(std::move(sums)), cross_(std::move(cross)), n_(n) {}

double BatchResult::cross(std::size_t a, std::size_t b) const {
  return cross_.at(packed_index(a, b, sums_.size()));
}

double BatchResult::difference(std::size_t a, std::size_t b) const {
  const std::pair<std::size_t, double> terms[] = {{a, 1.0}, {b, -1.0}};
  return contrast(terms).value;
}

double BatchResult::difference_standard_error(std::size_t a, std::size_t b) const {
  const std::pair<std::size_t, double> terms[] = {{a, 1.0}, {b, -1.0}};
  return contrast(terms).standard_error;
}

BatchResult::Contrast BatchResult::contrast(
    std::span<const std::pair<std::size_t, double>> terms) const {
  const double n = static_cast<double>(n_);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& [a, wa] : terms) {
    sum += wa * sums_.at(a);
    for (const auto& [b, wb] : terms) sum_sq += wa * wb * cross(a, b);
  }
  const double var = n > 1.0 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
  return {sum / n, std::sqrt(var / n)};
}

BatchResult estimate_batch(std::span<const Arm> arms, const MonteCarloSpec& spec) {
  spec.validate();
  if (arms.empty()) throw ArgumentError("at least one arm is required");

  // Sampling law per technology, taken from the arm with the most technologies.
  const auto widest = std::max_element(arms.begin(), arms.end(), [](const Arm& a, const Arm& b) {
    return a.configs.size() < b.configs.size();
  });
  const std::vector<TechnologyConfig> laws = widest->configs;
  const std::size_t tech_count = laws.size();

  std::vector<double> alphas;
  std::vector<std::vector<std::size_t>> alpha_index(arms.size());
  std::vector<BoundPolicy> bound;
  bound.reserve(arms.size());
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const Arm& arm = arms[a];
    if (arm.configs.empty()) throw ArgumentError("arm without technologies");
    if (arm.policy.depth() > spec.sampler.bs_count) {
      throw ArgumentError("policy " + arm.policy.name() + " reads more distances than sampled");
    }
    bound.emplace_back(arm.policy, arm.configs);
    for (std::size_t i = 0; i < arm.configs.size(); ++i) {
      const auto& c = arm.configs[i];
      if (c.lambda != laws[i].lambda || c.fading_mean_inv != laws[i].fading_mean_inv) {
        throw ArgumentError("arms disagree on the density or fading law of technology " +
                            std::to_string(i + 1));
      }
      auto it = std::find(alphas.begin(), alphas.end(), c.alpha);
      if (it == alphas.end()) it = alphas.insert(alphas.end(), c.alpha);
      alpha_index[a].push_back(static_cast<std::size_t>(it - alphas.begin()));
    }
  }

  SamplerSpec geometry = spec.sampler;
  geometry.tail_correction = false;
  const std::size_t n_arms = arms.size();
  const std::size_t n_cross = n_arms * (n_arms + 1) / 2;

  auto block = [&](std::size_t b, std::size_t count) {
    RandomStream world_rng(spec.sampler.seed, kWorldStream, b);
    RandomStream decision_rng(spec.sampler.seed, kDecisionStream, b);
    BlockSums out{std::vector<double>(n_arms, 0.0), std::vector<double>(n_cross, 0.0)};
    std::vector<LinkPowers> cache(tech_count * alphas.size());
    std::vector<char> cached(cache.size());
    std::vector<double> x(n_arms);
    for (std::size_t w = 0; w < count; ++w) {
      const NetworkRealization world = sample_realization(laws, geometry, world_rng);
      std::fill(cached.begin(), cached.end(), 0);
      for (std::size_t a = 0; a < n_arms; ++a) {
        const std::size_t tech = bound[a].decide(world, decision_rng).technology - 1;
        const std::size_t slot = tech * alphas.size() + alpha_index[a][tech];
        if (!cached[slot]) {
          cache[slot] = link_powers(world.technology(tech + 1), laws[tech],
                                    alphas[alpha_index[a][tech]], spec.sampler.tail_correction);
          cached[slot] = 1;
        }
        const auto& cfg = arms[a].configs[tech];
        const double s = cache[slot].signal /
                         (cfg.noise / cfg.power + cache[slot].interference);
        x[a] = arms[a].metric == Metric::coverage ? coverage_value(s, cfg.beta)
                                                  : rate_value(s, cfg.bandwidth);
      }
      std::size_t k = 0;
      for (std::size_t a = 0; a < n_arms; ++a) {
        out.sums[a] += x[a];
        for (std::size_t c = a; c < n_arms; ++c) out.cross[k++] += x[a] * x[c];
      }
    }
    return out;
  };
  const auto blocks = run_blocks<BlockSums>(spec, block);

  std::vector<double> sums(n_arms, 0.0);
  std::vector<double> cross(n_cross, 0.0);
  for (const auto& part : blocks) {
    for (std::size_t a = 0; a < n_arms; ++a) sums[a] += part.sums[a];
    for (std::size_t k = 0; k < n_cross; ++k) cross[k] += part.cross[k];
  }
  std::vector<PerformanceEstimate> estimates;
  for (std::size_t a = 0; a < n_arms; ++a) {
    estimates.push_back(summarize(sums[a], cross[packed_index(a, a, n_arms)], spec.n_worlds,
                                  arms[a].metric));
  }
  return BatchResult(std::move(estimates), std::move(sums), std::move(cross), spec.n_worlds);
}

PerformanceEstimate estimate(const Policy& policy, Metric metric,
                             std::span<const TechnologyConfig> configs,
                             const MonteCarloSpec& spec) {
  const Arm arm{policy, metric, {configs.begin(), configs.end()}};
  return estimate_batch(std::span(&arm, 1), spec)[0];
}

AgreementEstimate agreement_rate(const Policy& a, const Policy& b,
                                 std::span<const TechnologyConfig> configs,
                                 const MonteCarloSpec& spec) {
  spec.validate();
  if (std::max(a.depth(), b.depth()) > spec.sampler.bs_count) {
    throw ArgumentError("policies read more distances than sampled");
  }
  const BoundPolicy first(a, configs);
  const BoundPolicy second(b, configs);
  SamplerSpec geometry = spec.sampler;
  geometry.tail_correction = false;
  auto block = [&](std::size_t blk, std::size_t count) {
    RandomStream world_rng(spec.sampler.seed, kWorldStream, blk);
    RandomStream decision_rng(spec.sampler.seed, kDecisionStream, blk);
    std::size_t agree = 0;
    for (std::size_t w = 0; w < count; ++w) {
      const NetworkRealization world = sample_realization(configs, geometry, world_rng);
      const auto da = first.decide(world, decision_rng);
      const auto db = second.decide(world, decision_rng);
      if (da == db) ++agree;
    }
    return agree;
  };
  const auto blocks = run_blocks<std::size_t>(spec, block);
  std::size_t agree = 0;
  for (auto n : blocks) agree += n;
  AgreementEstimate out;
  out.n_samples = spec.n_worlds;
  out.rate = static_cast<double>(agree) / static_cast<double>(spec.n_worlds);
  std::tie(out.ci_low, out.ci_high) = wilson_interval(agree, spec.n_worlds);
  return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ArgumentError("no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) throw ArgumentError("empty sample");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::pair<double, double> t_interval(double sum, double sum_sq, std::size_t n, double confidence) {
  if (n < 2) throw ArgumentError("a t-interval needs at least two samples");
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum_sq - sum * sum / nn) / (nn - 1.0));
  const boost::math::students_t dist(nn - 1.0);
  const double q = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  return {mean, q * std::sqrt(var / nn)};
}

}  // namespace cellassoc
