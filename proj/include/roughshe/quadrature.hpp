#pragma once

// Globally adaptive Gauss-Kronrod (10/21) quadrature with initial
// breakpoints, plus helpers for Gaussian-dominated integrands on the real
// line and for integrable endpoint singularities.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include "roughshe/error.hpp"

namespace roughshe {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  /// Truncation radius for infinite domains, in standard deviations of
  /// the widest Gaussian factor.
  double gaussian_tail_sigmas = 12.0;

  /// Throws ValidationError on nonpositive tolerances or limits.
  void validate() const;

  QuadratureSpec with_tolerances(double abs, double rel) const {
    QuadratureSpec q = *this;
    q.abs_tol = abs;
    q.rel_tol = rel;
    return q;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// A localized feature of an integrand on the real line: a peak or kink at
/// `center` whose natural length scale is `width`.
struct Feature {
  double center;
  double width;
};

namespace detail {

struct Gk21Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Gk21Panel& o) const { return error < o.error; }
};

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452422, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

// One 21-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Gk21Panel gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  const double ahalf = std::abs(half);
  resk *= half;
  resabs *= ahalf;
  resasc *= ahalf;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk, err};
}

}  // namespace detail

/// Adaptive integration over consecutive panels [p0,p1], [p1,p2], ... given
/// by sorted breakpoints (at least two). Never throws on non-convergence;
/// inspect `converged`.
template <class F>
QuadratureResult integrate_panels(F&& f, std::span<const double> points, const QuadratureSpec& spec) {
  QuadratureResult out;
  if (points.size() < 2) return out;
  std::priority_queue<detail::Gk21Panel> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto p = detail::gk21(f, points[i], points[i + 1]);
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  int subdivisions = 0;
  auto done = [&] { return error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (!heap.empty() && !done() && subdivisions < spec.max_subdivisions) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel at machine resolution
    heap.pop();
    auto left = detail::gk21(f, worst.a, mid);
    auto right = detail::gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = error;
  out.subdivisions = subdivisions;
  out.converged = std::isfinite(total) && error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    auto r = integrate(f, b, a, spec);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> pts{a, b};
  return integrate_panels(f, std::span<const double>(pts), spec);
}

/// Breakpoints for a real-line integrand concentrated around `features`:
/// each feature contributes its center and center +- {1,3,6,12} widths, clipped
/// to the truncated domain [min c - k w_max, max c + k w_max].
std::vector<double> feature_breakpoints(std::span<const Feature> features, double tail_sigmas);

/// Integral over R of an integrand whose mass sits near the given features
/// (Gaussian-dominated tails). The truncated domain is widened while the
/// integrand at its ends is not negligible.
template <class F>
QuadratureResult integrate_line(F&& f, std::span<const Feature> features, const QuadratureSpec& spec) {
  auto pts = feature_breakpoints(features, spec.gaussian_tail_sigmas);
  auto res = integrate_panels(f, std::span<const double>(pts), spec);
  double wmax = 0.0;
  for (const auto& ft : features) wmax = std::max(wmax, ft.width);
  double lo = pts.front();
  double hi = pts.back();
  const double step = std::max(wmax, 1e-300) * spec.gaussian_tail_sigmas;
  auto negligible = [&](double x) {
    return std::abs(f(x)) * wmax <= 1e-3 * std::max(spec.abs_tol, spec.rel_tol * std::abs(res.value));
  };
  for (int grow = 0; grow < 40; ++grow) {
    const bool left_ok = negligible(lo);
    const bool right_ok = negligible(hi);
    if (left_ok && right_ok) break;
    if (!left_ok) {
      auto extra = integrate(f, lo - step, lo, spec);
      res.value += extra.value;
      res.abs_error += extra.abs_error;
      res.converged = res.converged && extra.converged;
      lo -= step;
    }
    if (!right_ok) {
      auto extra = integrate(f, hi, hi + step, spec);
      res.value += extra.value;
      res.abs_error += extra.abs_error;
      res.converged = res.converged && extra.converged;
      hi += step;
    }
  }
  return res;
}

/// Integral over [a, b] of an integrand with an integrable (b - s)^{-1/2}
/// singularity at the right end, via s = b - r^2.
namespace detail {
// f(s) or f(s, b - s); the two-argument form receives the distance to the
// singular end exactly instead of reconstructing it from s.
template <class F>
double eval_sd(F& f, double s, double d) {
  if constexpr (std::is_invocable_v<F&, double, double>)
    return f(s, d);
  else
    return f(s);
}
}  // namespace detail

template <class F>
QuadratureResult integrate_sqrt_right(F&& f, double a, double b, const QuadratureSpec& spec) {
  if (!(b > a)) return {0.0, 0.0, 0, true};
  auto g = [&](double r) { return 2.0 * r * detail::eval_sd(f, b - r * r, r * r); };
  return integrate(g, 0.0, std::sqrt(b - a), spec);
}

/// Integral over [0, t] of an integrand with integrable singularities at
/// both ends: behaving like s^{-beta} (beta < 1) at 0 and (t-s)^{-1/2} at t.
/// The left half uses s = (t/2) w^4, the right half s = t - r^2.
template <class F>
QuadratureResult integrate_two_sided(F&& f, double t, const QuadratureSpec& spec) {
  if (!(t > 0.0)) return {0.0, 0.0, 0, true};
  const double half = 0.5 * t;
  auto left = [&](double w) {
    const double w2 = w * w;
    const double s = half * w2 * w2;
    return 4.0 * half * w2 * w * detail::eval_sd(f, s, t - s);
  };
  auto right = [&](double r) { return 2.0 * r * detail::eval_sd(f, t - r * r, r * r); };
  QuadratureSpec sub = spec;
  sub.abs_tol = 0.5 * spec.abs_tol;
  auto l = integrate(left, 0.0, 1.0, sub);
  auto r = integrate(right, 0.0, std::sqrt(half), sub);
  QuadratureResult out;
  out.value = l.value + r.value;
  out.abs_error = l.abs_error + r.abs_error;
  out.subdivisions = l.subdivisions + r.subdivisions;
  out.converged = l.converged && r.converged;
  return out;
}

/// Throws NumericalError when `r` did not converge; otherwise returns value.
double require_converged(const QuadratureResult& r, const char* what);

}  // namespace roughshe
