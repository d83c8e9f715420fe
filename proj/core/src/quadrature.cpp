#include "cellassoc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "cellassoc/types.hpp"

namespace cellassoc {
namespace {

// 21-point Kronrod abscissae on [0, 1]; odd entries are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525200341, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& g, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  fv[10] = g(center);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = g(center - dx);
    fv[20 - j] = g(center + dx);
  }
  double resk = kWgk[10] * fv[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  for (int j = 0; j < 10; ++j) {
    const double pair = fv[j] + fv[20 - j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[20 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fv[10] - mean);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[20 - j] - mean));
  }
  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return Segment{a, b, resk, err, depth};
}

QuadratureResult adaptive(const std::function<double(double)>& g, double a, double b,
                          const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(g, a, b, 0);
  double total = first.value;
  double total_err = first.error;
  int evaluations = 21;
  heap.push(first);

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  int intervals = 1;
  while (total_err > tolerance()) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    const bool too_deep = worst.depth >= spec.max_depth;
    const bool too_many = intervals >= spec.max_intervals;
    const bool unresolvable = !(mid > worst.a && mid < worst.b);
    if (too_deep || too_many || unresolvable) {
      throw QuadratureError(
          std::string("quadrature did not converge: ") +
              (too_deep ? "maximum depth" : too_many ? "interval budget" : "roundoff") +
              " reached (estimate " + std::to_string(total) + ", error " +
              std::to_string(total_err) + ")",
          total, total_err);
    }
    heap.pop();
    Segment left = gauss_kronrod(g, worst.a, mid, worst.depth + 1);
    Segment right = gauss_kronrod(g, mid, worst.b, worst.depth + 1);
    evaluations += 42;
    ++intervals;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (total_err < 0.0) {
      // Accumulated cancellation; recompute from the live segments.
      total_err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  // Re-sum the live segments to drop accumulated rounding from the running total.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return QuadratureResult{sum, total_err, evaluations};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw ArgumentError("quadrature tolerances must be positive");
  }
  if (max_depth < 1 || max_intervals < 1) {
    throw ArgumentError("quadrature limits must be positive");
  }
  if (!(tail_exponent >= 1.0)) throw ArgumentError("tail_exponent must be >= 1");
}

QuadratureSpec QuadratureSpec::tighter(double factor) const {
  QuadratureSpec s = *this;
  s.rel_tol = std::max(rel_tol / factor, 1e-14);
  s.abs_tol = std::max(abs_tol / factor, 1e-300);
  return s;
}

QuadratureResult integrate_detailed(const std::function<double(double)>& f, double lower,
                                    double upper, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(lower) || std::isnan(upper)) throw ArgumentError("NaN integration bound");
  if (lower == upper) return {};
  if (lower > upper) {
    auto r = integrate_detailed(f, upper, lower, spec);
    r.value = -r.value;
    return r;
  }
  const double m = spec.tail_exponent;
  if (std::isinf(lower) && std::isinf(upper)) {
    auto left = integrate_detailed(f, lower, 0.0, spec);
    auto right = integrate_detailed(f, 0.0, upper, spec);
    return {left.value + right.value, left.error + right.error,
            left.evaluations + right.evaluations};
  }
  if (std::isinf(upper)) {
    auto g = [&](double s) {
      const double w = 1.0 - s;
      const double u = lower + (std::pow(w, -m) - 1.0);
      if (!std::isfinite(u)) return 0.0;
      const double fu = f(u);
      return fu == 0.0 ? 0.0 : fu * m * std::pow(w, -m - 1.0);
    };
    return adaptive(g, 0.0, 1.0, spec);
  }
  if (std::isinf(lower)) {
    auto g = [&](double s) {
      const double w = 1.0 - s;
      const double u = upper - (std::pow(w, -m) - 1.0);
      if (!std::isfinite(u)) return 0.0;
      const double fu = f(u);
      return fu == 0.0 ? 0.0 : fu * m * std::pow(w, -m - 1.0);
    };
    return adaptive(g, 0.0, 1.0, spec);
  }
  return adaptive(f, lower, upper, spec);
}

}  // namespace cellassoc
