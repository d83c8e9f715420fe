#include "cellassoc/interference.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "cellassoc/types.hpp"

namespace cellassoc {
namespace {

constexpr double kLogLo = -12.0;
constexpr double kLogHi = 12.0;
constexpr int kNodes = 16384;

// G(z) for z above the grid: 1/(1+x^a) = sum_k (-1)^k x^(-a(k+1)) integrated term by term.
double large_z_series(double z, double alpha) {
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 4; ++k) {
    const double p = k * alpha - 2.0;
    sum += sign * std::pow(z, -p) / p;
    sign = -sign;
  }
  return sum;
}

}  // namespace

InterferenceTail::InterferenceTail(double alpha, QuadratureSpec spec)
    : alpha_(alpha), spec_(spec), at_zero_(0.0) {
  if (!(alpha > 2.0)) throw DivergenceError("interference tail diverges for alpha <= 2");
  at_zero_ = (*this)(0.0);
}

double InterferenceTail::operator()(double z) const {
  if (z < 0.0) throw ArgumentError("interference tail needs z >= 0");
  const double a = alpha_;
  auto integrand = [a](double x) { return x / (1.0 + std::pow(x, a)); };
  QuadratureSpec s = spec_;
  // Scale the absolute floor with the leading asymptote so large z keeps relative accuracy.
  const double scale = z > 1.0 ? std::pow(z, 2.0 - a) / (a - 2.0) : 1.0;
  s.abs_tol = std::max(1e-300, spec_.rel_tol * scale * 1e-3);
  if (z < 1.0) {
    // Split at 1 so the finite part is integrated without the algebraic map.
    return integrate(integrand, z, 1.0, s) + integrate(integrand, 1.0, kInf, s);
  }
  return integrate(integrand, z, kInf, s);
}

TabulatedTail::TabulatedTail(double alpha) : alpha_(alpha), at_zero_(0.0), lo_(kLogLo) {
  InterferenceTail exact(alpha);
  at_zero_ = exact.at_zero();
  step_ = (kLogHi - kLogLo) / kNodes;
  log_value_.resize(kNodes + 1);
  log_slope_.resize(kNodes + 1);
  for (int i = 0; i <= kNodes; ++i) {
    const double ell = lo_ + i * step_;
    const double z = std::exp(ell);
    const double g = exact(z);
    log_value_[i] = std::log(g);
    // d ln G / d ln z = z G'(z) / G(z), with G'(z) = -z / (1 + z^alpha).
    log_slope_[i] = -z * z / ((1.0 + std::pow(z, alpha)) * g);
  }
}

double TabulatedTail::operator()(double z) const {
  if (z < 0.0) throw ArgumentError("interference tail needs z >= 0");
  const double ell = z > 0.0 ? std::log(z) : -kInf;
  if (ell <= kLogLo) {
    return at_zero_ - 0.5 * z * z + std::pow(z, alpha_ + 2.0) / (alpha_ + 2.0);
  }
  if (ell >= kLogHi) return large_z_series(z, alpha_);
  const double pos = (ell - lo_) / step_;
  auto i = static_cast<int>(pos);
  if (i >= kNodes) i = kNodes - 1;
  const double t = pos - i;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double y = h00 * log_value_[i] + h10 * step_ * log_slope_[i] +
                   h01 * log_value_[i + 1] + h11 * step_ * log_slope_[i + 1];
  return std::exp(y);
}

const TabulatedTail& tail_table(double alpha) {
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<TabulatedTail>> tables;
  std::lock_guard lock(mutex);
  auto it = tables.find(alpha);
  if (it == tables.end()) {
    it = tables.emplace(alpha, std::make_unique<TabulatedTail>(alpha)).first;
  }
  return *it->second;
}

double interference_integral(double a, double r_ref, double beta, double alpha) {
  const double scale = std::pow(beta, -1.0 / alpha);
  return r_ref * r_ref * std::pow(beta, 2.0 / alpha) * tail_table(alpha)(a * scale / r_ref);
}

}  // namespace cellassoc
