#pragma once

#include <array>

#include "roughshe/quadrature.hpp"

namespace roughshe {

struct KernelParams {
  double nu;
  explicit KernelParams(double nu_);
};

// G_nu(t, x). Strict variant: t must be positive.
double heat_kernel(const KernelParams& p, double t, double x);
// Same, with G(t, .) = 0 for t <= 0.
double heat_kernel_total(const KernelParams& p, double t, double x);
// Unchecked hot-path version; callers guarantee nu, t > 0.
inline double gauss(double nu, double t, double x) {
  const double v = nu * t;
  return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
}

double std_normal_cdf(double x);
double erf_fn(double x);
double erfc_fn(double x);
double gamma_fn(double x);

// int_0^t s^{mu-1} (t-s)^{nu-1} ds
double beta_time_integral(double mu_exp, double nu_exp, double t);

struct KernelArg {
  double time;
  double location;
};
struct ProductFactorization {
  KernelArg first;
  KernelArg second;
};

// G(t,x) G(s,y) = G(first) G(second)
ProductFactorization product_identity(const KernelParams& p, double t, double s, double x, double y);
// G_nu^2(t,x) via (4 pi nu t)^{-1/2} G_{nu/2}(t,x)
double square_identity(const KernelParams& p, double t, double x);

// int_0^t G_nu(s,x) G_sigma(t-s,y) ds
double time_convolution_closed_form(double nu, double sigma, double t, double x, double y);
// x = 0 case: int_0^t G_sigma(t-s,y) / sqrt(2 pi nu s) ds
double time_convolution_origin(double nu, double sigma, double t, double y);
// sqrt(pi t / (2 nu)) G_sigma(t,y), an upper bound for the origin case
double time_convolution_origin_bound(double nu, double sigma, double t, double y);

// int_0^t G_nu(s,x) ds
double time_integral_closed_form(double nu, double t, double x);

// int_t^{t'} (s (t'-s))^{-1/2} ds
double arcsin_time_integral(double t, double t_prime);

struct VariationIntegrals {
  double spatial;        // int_0^t int [G(t-r,x-z) - G(t-r,y-z)]^2
  double temporal;       // int_0^s int [G(t-r,x-z) - G(s-r,x-z)]^2
  double short_interval; // int_s^t int G(t-r,x-z)^2
  double combined;       // int_R+ int (G(t-r,x-z) - G(s-r,y-z))^2

  static constexpr double C1 = 1.0;
  static const double C2;
  static const double C3;
};

// The four space-time L^2 variations of the heat kernel; the z-integrals are
// reduced in closed form, the r-integrals done by quadrature.
VariationIntegrals variation_integrals(double nu, double s, double t, double x, double y,
                                       const QuadratureSpec& spec = {});

// sup_x |exp(-x^2/2) - 1| / |x|
double sup_ratio_constant();

// Ratio bound in the small-time gradient estimate of the heat kernel: the
// common factor (C / sqrt(2 nu t) + 1/((1-beta) L)) [G(t,x) + e^{2L^2/(nu t)}(G(t,x-2L) + G(t,x+2L))]
double gradient_envelope(double nu, double t, double x, double L, double beta);

}  // namespace roughshe
