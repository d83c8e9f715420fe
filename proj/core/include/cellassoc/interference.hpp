#pragma once

#include <vector>

#include "cellassoc/quadrature.hpp"

namespace cellassoc {

// Every Rayleigh-faded interference integral of a power-law PPP reduces to
//
//   G_alpha(z) = \int_z^\infty x / (1 + x^alpha) dx,
//
// e.g. \int_a^\infty u / (1 + beta^-1 (u/r)^alpha) du = r^2 beta^(2/alpha) G(a beta^(-1/alpha) / r).

/// G_alpha evaluated by adaptive quadrature on every call.
class InterferenceTail {
 public:
  explicit InterferenceTail(double alpha, QuadratureSpec spec = {1e-13, 1e-300});

  double alpha() const { return alpha_; }
  double operator()(double z) const;
  /// G_alpha(0).
  double at_zero() const { return at_zero_; }

 private:
  double alpha_;
  QuadratureSpec spec_;
  double at_zero_;
};

/// G_alpha interpolated from quadrature values: piecewise cubic Hermite in
/// (ln z, ln G) with exact slopes on a uniform grid, and truncated series outside
/// the grid. Relative accuracy is ~1e-11 or better for alpha <= 10.
class TabulatedTail {
 public:
  explicit TabulatedTail(double alpha);

  double alpha() const { return alpha_; }
  double operator()(double z) const;

 private:
  double alpha_;
  double at_zero_;
  double lo_;
  double step_;
  std::vector<double> log_value_;
  std::vector<double> log_slope_;
};

/// Process-wide table for `alpha`, built on first use. Thread-safe; the reference
/// stays valid for the life of the program.
const TabulatedTail& tail_table(double alpha);

/// \int_a^\infty u / (1 + beta^-1 (u / r_ref)^alpha) du, via the shared table.
double interference_integral(double a, double r_ref, double beta, double alpha);

}  // namespace cellassoc
