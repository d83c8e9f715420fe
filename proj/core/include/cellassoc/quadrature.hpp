#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace cellassoc {

/// Tolerances and limits for adaptive quadrature.
struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_depth = 48;          ///< maximum bisection depth of any subinterval
  int max_intervals = 4000;    ///< total subinterval budget
  double tail_exponent = 4.0;  ///< m in u = a + (1-s)^-m - 1 for semi-infinite ranges

  void validate() const;
  /// Same spec with tolerances divided by `factor` (inner integrals of a nested pair).
  QuadratureSpec tighter(double factor = 10.0) const;
};

/// Raised when the tolerance cannot be met within the subdivision limits.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial, double error_estimate)
      : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}
  double partial() const { return partial_; }
  double error_estimate() const { return error_estimate_; }

 private:
  double partial_;
  double error_estimate_;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [lower, upper].
/// Either bound may be infinite; infinite ranges are mapped onto [0, 1) with an
/// algebraic substitution so that integrands decaying like u^-p with p > 1 stay
/// integrable after the change of variables.
QuadratureResult integrate_detailed(const std::function<double(double)>& f, double lower,
                                    double upper, const QuadratureSpec& spec = {});

inline double integrate(const std::function<double(double)>& f, double lower, double upper,
                        const QuadratureSpec& spec = {}) {
  return integrate_detailed(f, lower, upper, spec).value;
}

}  // namespace cellassoc
