#include "roughshe/gaussian_kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace roughshe {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::domain_error(std::string(name) + " must be finite");
}

void require_positive(double v, const char* name) {
  require_finite(v, name);
  if (!(v > 0.0)) throw std::domain_error(std::string(name) + " must be positive");
}

}  // namespace

const double VariationIntegrals::C2 = (std::sqrt(2.0) - 1.0) / std::sqrt(M_PI);
const double VariationIntegrals::C3 = 1.0 / std::sqrt(M_PI);

KernelParams::KernelParams(double nu_) : nu(nu_) { require_positive(nu_, "nu"); }

double heat_kernel(const KernelParams& p, double t, double x) {
  require_positive(t, "t");
  require_finite(x, "x");
  return gauss(p.nu, t, x);
}

double heat_kernel_total(const KernelParams& p, double t, double x) {
  require_finite(t, "t");
  require_finite(x, "x");
  if (t <= 0.0) return 0.0;
  return gauss(p.nu, t, x);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

double erf_fn(double x) { return std::erf(x); }

// glibc erfc is evaluated without the 1 - erf subtraction and keeps full
// relative accuracy deep into the tail.
double erfc_fn(double x) { return std::erfc(x); }

double gamma_fn(double x) {
  require_positive(x, "x");
  return std::tgamma(x);
}

double beta_time_integral(double mu_exp, double nu_exp, double t) {
  require_positive(mu_exp, "mu_exp");
  require_positive(nu_exp, "nu_exp");
  require_positive(t, "t");
  const double logb = std::lgamma(mu_exp) + std::lgamma(nu_exp) - std::lgamma(mu_exp + nu_exp);
  return std::pow(t, mu_exp + nu_exp - 1.0) * std::exp(logb);
}

ProductFactorization product_identity(const KernelParams&, double t, double s, double x, double y) {
  require_positive(t, "t");
  require_positive(s, "s");
  require_finite(x, "x");
  require_finite(y, "y");
  const double sum = t + s;
  return {{t * s / sum, (s * x + t * y) / sum}, {sum, x - y}};
}

double square_identity(const KernelParams& p, double t, double x) {
  require_positive(t, "t");
  return gauss(p.nu / 2.0, t, x) / std::sqrt(4.0 * M_PI * p.nu * t);
}

double time_convolution_closed_form(double nu, double sigma, double t, double x, double y) {
  require_positive(nu, "nu");
  require_positive(sigma, "sigma");
  require_positive(t, "t");
  const double arg = (std::abs(x) / std::sqrt(nu) + std::abs(y) / std::sqrt(sigma)) / std::sqrt(2.0 * t);
  return std::erfc(arg) / (2.0 * std::sqrt(nu * sigma));
}

double time_convolution_origin(double nu, double sigma, double t, double y) {
  return time_convolution_closed_form(nu, sigma, t, 0.0, y);
}

double time_convolution_origin_bound(double nu, double sigma, double t, double y) {
  require_positive(nu, "nu");
  require_positive(sigma, "sigma");
  require_positive(t, "t");
  return std::sqrt(M_PI * t / (2.0 * nu)) * gauss(sigma, t, y);
}

double time_integral_closed_form(double nu, double t, double x) {
  require_positive(nu, "nu");
  require_positive(t, "t");
  require_finite(x, "x");
  const double ax = std::abs(x);
  return 2.0 * t * gauss(nu, t, x) - (ax / nu) * std::erfc(ax / std::sqrt(2.0 * nu * t));
}

double arcsin_time_integral(double t, double t_prime) {
  require_positive(t_prime, "t_prime");
  require_finite(t, "t");
  if (t < 0.0 || t > t_prime) throw std::domain_error("arcsin_time_integral needs 0 <= t <= t'");
  return 2.0 * std::asin(std::sqrt((t_prime - t) / t_prime));
}

VariationIntegrals variation_integrals(double nu, double s, double t, double x, double y,
                                       const QuadratureSpec& spec) {
  require_positive(nu, "nu");
  require_finite(s, "s");
  require_finite(t, "t");
  if (s < 0.0 || s > t) throw std::domain_error("variation_integrals needs 0 <= s <= t");
  const double dxy = x - y;
  VariationIntegrals v{};
  // Integrating the z variable with the semigroup property,
  //   int G(a, x-z) G(b, y-z) dz = G(a+b, x-y),
  // leaves one-dimensional integrals in r with (t-r)^{-1/2} singularities.
  if (t > 0.0 && dxy != 0.0) {
    auto f = [&](double, double tau) {
      if (tau <= 0.0) return 0.0;
      return 2.0 * (gauss(nu, 2.0 * tau, 0.0) - gauss(nu, 2.0 * tau, dxy));
    };
    v.spatial = require_converged(integrate_sqrt_right(f, 0.0, t, spec), "variation_integrals.spatial");
  }
  if (s > 0.0 && t > s) {
    // b = s - r, a = t - r
    auto f = [&](double, double b) {
      const double a = (t - s) + b;
      if (b <= 0.0) return gauss(nu, 2.0 * a, 0.0);
      return gauss(nu, 2.0 * a, 0.0) + gauss(nu, 2.0 * b, 0.0) - 2.0 * gauss(nu, a + b, 0.0);
    };
    v.temporal = require_converged(integrate_sqrt_right(f, 0.0, s, spec), "variation_integrals.temporal");
  }
  v.short_interval = std::sqrt(t - s) / std::sqrt(M_PI * nu);
  {
    // squares integrate exactly; only the cross term needs quadrature
    const double diag = (std::sqrt(t) + std::sqrt(s)) / std::sqrt(M_PI * nu);
    double cross = 0.0;
    if (s > 0.0 && t > s) {
      auto f = [&](double, double b) { return gauss(nu, (t - s) + 2.0 * b, dxy); };
      cross = require_converged(integrate_sqrt_right(f, 0.0, s, spec), "variation_integrals.combined");
    } else if (s > 0.0) {
      cross = time_integral_closed_form(2.0 * nu, s, dxy);
    }
    v.combined = std::max(0.0, diag - 2.0 * cross);
  }
  return v;
}

double sup_ratio_constant() {
  auto g = [](double x) { return -std::expm1(-0.5 * x * x) / x; };
  // coarse scan on [0.1, 10]; the objective must rise then fall there
  const int n = 1000;
  double best_x = 0.1;
  double best = g(0.1);
  double prev = best;
  int turns = 0;
  bool rising = true;
  for (int i = 1; i <= n; ++i) {
    const double x = 0.1 + (10.0 - 0.1) * i / n;
    const double v = g(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    if ((v > prev) != rising) {
      rising = !rising;
      ++turns;
    }
    prev = v;
  }
  if (turns != 1) throw NumericalError("sup_ratio_constant: objective not unimodal on the scan grid");
  double a = std::max(0.1, best_x - 0.01);
  double b = std::min(10.0, best_x + 0.01);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > 1e-13) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = g(d);
    }
  }
  return g(0.5 * (a + b));
}

double gradient_envelope(double nu, double t, double x, double L, double beta) {
  static const double C = sup_ratio_constant();
  const double lead = C / std::sqrt(2.0 * nu * t) + 1.0 / ((1.0 - beta) * L);
  // e^{2L^2/(nu t)} G(t, x -+ 2L), exponents combined so neither factor overflows.
  // The Gronwall constant carries an extra e^{L^2/(2 nu t)} into the side
  // terms, so the factor is e^{4L^2/(2 nu t)}; with e^{3L^2/(2 nu t)} the
  // bound fails, e.g. nu t ~ 2e-3, L ~ 2.9, x ~ 0.68, h ~ -0.3.
  const double pre = 1.0 / std::sqrt(2.0 * M_PI * nu * t);
  auto shifted = [&](double c) { return pre * std::exp((4.0 * L * L - c * c) / (2.0 * nu * t)); };
  const double side = shifted(x - 2.0 * L) + shifted(x + 2.0 * L);
  return lead * (gauss(nu, t, x) + side);
}

}  // namespace roughshe
