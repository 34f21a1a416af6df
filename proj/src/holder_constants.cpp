#include "roughshe/holder_constants.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "roughshe/gaussian_kernel.hpp"

namespace roughshe {

namespace {

// int exp(k|z|^a) N(y - z; 0, v) dz, with v = 0 meaning point evaluation
double exp_power_conv(double k, double a, double v, double y, const QuadratureSpec& spec) {
  if (v <= 0.0) return std::exp(k * std::pow(std::abs(y), a));
  if (a == 0.0) return std::exp(k);
  const double sd = std::sqrt(v);
  // maximiser of k|z|^a - (z-y)^2/(2v), by damped fixed point
  double z = y;
  for (int i = 0; i < 200; ++i) {
    const double az = std::max(std::abs(z), 1e-12);
    const double next = y + v * k * a * std::pow(az, a - 1.0) * (z >= 0.0 ? 1.0 : -1.0);
    if (std::abs(next - z) < 1e-12 * (1.0 + std::abs(z))) {
      z = next;
      break;
    }
    z = 0.5 * (z + next);
  }
  const double peak_width = a < 2.0 ? sd / std::sqrt(std::max(2.0 - a, 1e-3)) : sd;
  const Feature feats[] = {{y, sd}, {0.0, std::min(sd, 1.0)}, {z, peak_width}};
  auto f = [&](double u) {
    const double d = y - u;
    return std::exp(k * std::pow(std::abs(u), a) - d * d / (2.0 * v)) / std::sqrt(2.0 * M_PI * v);
  };
  const double r = require_converged(integrate_line(f, std::span<const Feature>(feats), spec), "exp_power_conv");
  if (!std::isfinite(r)) throw NumericalError("exp_power_conv: overflow");
  return r;
}

SupSearch grid_sup(const std::function<double(double, double)>& F, double s_lo, double s_hi, double y_lo,
                   double y_hi, int N, int refine) {
  SupSearch out;
  out.s_lo = s_lo;
  out.s_hi = s_hi;
  out.y_lo = y_lo;
  out.y_hi = y_hi;
  out.grid_points = N;
  out.refine_factor = refine;
  const double ds = (s_hi - s_lo) / (N - 1);
  const double dy = (y_hi - y_lo) / (N - 1);
  double best = -std::numeric_limits<double>::infinity();
  double bs = s_lo, by = y_lo;
  for (int i = 0; i < N; ++i) {
    const double s = s_lo + ds * i;
    for (int j = 0; j < N; ++j) {
      const double y = y_lo + dy * j;
      const double v = F(s, y);
      if (v > best) {
        best = v;
        bs = s;
        by = y;
      }
    }
  }
  // one local pass at refine x finer spacing around the coarse argmax
  const double s0 = std::max(s_lo, bs - ds), s1 = std::min(s_hi, bs + ds);
  const double y0 = std::max(y_lo, by - dy), y1 = std::min(y_hi, by + dy);
  const int M = 2 * refine + 1;
  for (int i = 0; i < M; ++i) {
    const double s = s0 + (s1 - s0) * i / (M - 1);
    for (int j = 0; j < M; ++j) {
      const double y = y0 + (y1 - y0) * j / (M - 1);
      const double v = F(s, y);
      if (v > best) {
        best = v;
        bs = s;
        by = y;
      }
    }
  }
  if (!std::isfinite(best)) throw NumericalError("grid_sup: non-finite supremum");
  out.value = best;
  out.arg_s = bs;
  out.arg_y = by;
  return out;
}

}  // namespace

double k_ac_variance(double a, double c, double v, const QuadratureSpec& spec) {
  if (!(a >= 0.0)) throw std::domain_error("k_ac: a must be >= 0");
  if (a >= 2.0) throw std::domain_error("k_ac: a >= 2 diverges");
  if (!(c > 0.0)) throw std::domain_error("k_ac: c must be positive");
  if (!(v >= 0.0)) throw std::domain_error("k_ac: variance must be >= 0");
  return exp_power_conv(c, a, v, 0.0, spec);
}

double k_ac(double a, double c, double nu, double t, const QuadratureSpec& spec) {
  if (!(nu > 0.0)) throw std::domain_error("k_ac: nu must be positive");
  if (!(t >= 0.0)) throw std::domain_error("k_ac: t must be >= 0");
  return k_ac_variance(a, c, nu * t, spec);
}

DeltaGConstants delta_g_constants(double n, double a, double c) {
  if (!(n > 0.0)) throw std::domain_error("delta_g_constants: n must be positive");
  if (!(a > 1.0)) throw std::domain_error("delta_g_constants: a must exceed 1");
  if (!(c > 0.0)) throw std::domain_error("delta_g_constants: c must be positive");
  DeltaGConstants d{n, a, c, 0, 0, 0, 0};
  d.c1 = (c + (a - 1.0) / (a * M_E)) * std::pow(2.0, a - 1.0);
  d.c2 = d.c1 * std::pow(n, a / 2.0) + 1.0 / (a * M_E);
  d.c3 = a * c * std::exp(d.c1 * std::pow(n, a));
  d.c4 = d.c1 * std::pow(n, a / 2.0);
  return d;
}

double IncrementBoundConstants::c_np(bool star) const {
  const auto& K = star ? C_star.value() : C;
  const double time_part = K[0] + K[4] + upsilon_star_n * (K[1] + K[5]);
  const double space_part = K[2] + upsilon_star_n * K[3];
  return std::sqrt(4.0 * z_p * z_p * lip * lip * std::max(time_part, space_part));
}

IncrementBoundConstants compute_constants(const InitialMeasure& m, const RhoSpec& rho, double nu, int p, double n,
                                          bool star, const ConstantsOptions& opt) {
  rho.validate();
  if (!(nu > 0.0)) throw ValidationError("nu", "must be positive");
  if (!(n > 1.0)) throw ValidationError("n", "must exceed 1");
  if (opt.grid_points < 3) throw ValidationError("grid_points", "must be >= 3");
  const auto cls = classify(m);
  if (!cls.in_MH) throw ValidationError("measure", "not in M_H");
  if (star && !cls.in_MH_star) throw ValidationError("measure", "starred constants need a measure in M_H*");

  IncrementBoundConstants k;
  k.n = n;
  k.p = p;
  k.nu = nu;
  k.lip = rho.lip_rho();
  k.vip = rho.vip_rho();
  const auto bdg = bdg_constants(p, k.vip);
  k.z_p = bdg.z_p_bound;
  k.a_p = bdg.a_p_vip;
  k.upsilon_star_n = upsilon(MomentKernel(nu, k.a_p * k.z_p * k.lip), n);
  k.provenance.grid_points = opt.grid_points;
  k.provenance.refine_factor = opt.refine_factor;
  k.provenance.safety_margin = opt.safety_margin;

  const double infl = 1.0 + opt.safety_margin;
  const double vip2 = k.vip * k.vip;
  const auto absm = m.abs_view();
  const int N = opt.grid_points;
  const int R = opt.refine_factor;
  auto jabs = [&](double nu_eff, double s, double y) { return j0(absm, nu_eff, s, y, false, opt.quad); };

  const double c_star_nu = 2.0 / std::sqrt(M_PI * nu);
  const double c_star_n_nu = 3.0 * std::sqrt(M_PI) * (1.0 + std::sqrt(2.0)) * (1.0 + n * n) / (2.0 * std::sqrt(nu));
  const double C = sup_ratio_constant();
  // gradient bound for G_{nu/2} with L = 2n, beta = 1/2, s in [1/n, n]:
  // C/sqrt(nu s) + 1/n and the side factor e^{2L^2/((nu/2) s)} <= e^{16 n^3/nu}
  const double c_prime = C * std::sqrt(n) / std::sqrt(nu) + 1.0 / n;
  const double c_second = c_prime * std::exp(16.0 * n * n * n / nu);

  auto s1 = grid_sup(
      [&](double s, double y) {
        const double a = jabs(2.0 * nu, s, y);
        const double b = jabs(2.0 * nu * (1.0 + n * n), s, y);
        return 2.0 * (c_star_nu * a * a + c_star_n_nu * b * b);
      },
      1.0 / n, n, -n, n, N, R);
  auto s3 = grid_sup(
      [&](double s, double y) {
        const double a = jabs(2.0 * nu, s, y);
        return a * a;
      },
      1.0 / n, n, -5.0 * n, 5.0 * n, N, R);
  // |J0*(2s,y)|^2 = (|mu| * G_{2nu}(s))^2(y)
  auto s5 = grid_sup(
      [&](double s, double y) {
        const double a = jabs(nu, 2.0 * s, y);
        return a * a;
      },
      1.0 / n, n, -n, n, N, R);
  k.provenance.sups = {{"C1", s1}, {"C3", s3}, {"C5", s5}};

  k.C[0] = vip2 * (std::sqrt(2.0) - 1.0) / std::sqrt(M_PI * nu) + infl * s1.value;
  k.C[2] = vip2 / nu + (2.0 / nu + std::sqrt(M_PI * n) / std::sqrt(nu) * (c_prime + 2.0 * c_second)) * infl * s3.value;
  k.C[4] = vip2 / std::sqrt(M_PI * nu) + 2.0 * std::sqrt(M_PI / nu) * infl * s5.value;
  const double r = std::sqrt(M_PI * n) / std::sqrt(4.0 * nu);
  k.C[1] = r * k.C[0];
  k.C[3] = r * k.C[2];
  k.C[5] = r * k.C[4];

  if (star) {
    const auto sg = star_growth(m);
    const double a = sg.b;
    const double c = sg.c;
    const double ca = std::pow(2.0, a);
    const auto dg = delta_g_constants(n, a, ca);
    const double K1 = k_ac_variance(a, 1.0, 2.0 * nu * n, opt.quad);
    const double Kc2 = k_ac_variance(a, dg.c2, nu / 2.0, opt.quad);
    const double Kc4 = k_ac_variance(a, dg.c4, nu / 2.0, opt.quad);
    auto sgs = grid_sup([&](double s, double y) { return exp_power_conv(ca, a, 0.5 * nu * s, y, opt.quad); }, 0.0, n,
                        -n, n, N, R);
    auto s5s = grid_sup(
        [&](double s, double y) {
          const double v = exp_power_conv(1.0, a, 2.0 * nu * s, y, opt.quad);
          return v * v;
        },
        0.0, n, -n, n, N, R);
    k.provenance.sups.push_back({"g_conv", sgs});
    k.provenance.sups.push_back({"C5_star", s5s});
    const double Sg = infl * sgs.value;
    const double ct1 = c * c * K1 / std::sqrt(2.0 * M_PI * nu) *
                       ((std::sqrt(2.0) + 1.0) * a * ca * std::sqrt(n) * std::exp(dg.c1 * std::pow(n, a)) * Kc2 +
                        (4.0 - std::sqrt(2.0)) * Sg);
    const double ct3 = c * c * K1 *
                       (dg.c3 * std::sqrt(n) / std::sqrt(M_PI * nu) * Kc4 +
                        (C * std::sqrt(2.0) / (nu * std::sqrt(M_PI)) + 1.0 / nu) * Sg);
    std::array<double, 6> cs{};
    cs[0] = vip2 * (std::sqrt(2.0) - 1.0) / std::sqrt(M_PI * nu) + 2.0 * ct1;
    cs[2] = vip2 / nu + 2.0 * ct3;
    cs[4] = vip2 / std::sqrt(M_PI * nu) + 2.0 * c * c * std::sqrt(M_PI / nu) * infl * s5s.value;
    const double rs = std::sqrt(n) / std::sqrt(M_PI * nu);
    cs[1] = rs * cs[0];
    cs[3] = rs * cs[2];
    cs[5] = rs * cs[4];
    k.C_star = cs;
  }
  for (double v : k.C)
    if (!std::isfinite(v) || !(v > 0.0)) throw NumericalError("compute_constants: non-finite or nonpositive constant");
  if (k.C_star)
    for (double v : *k.C_star)
      if (!std::isfinite(v) || !(v > 0.0)) throw NumericalError("compute_constants: non-finite starred constant");
  return k;
}

double increment_bound(const IncrementBoundConstants& k, int p, double t, double x, double t_prime, double x_prime,
                       bool star) {
  if (p != k.p) throw std::domain_error("increment_bound: constants were computed for another p");
  if (star && !k.C_star) throw std::domain_error("increment_bound: no starred constants");
  const double eps = 1e-12 * k.n;
  const double tlo = star ? 0.0 : 1.0 / k.n;
  auto in_window = [&](double tt, double xx) {
    return tt >= tlo - eps && tt <= k.n + eps && xx >= -k.n - eps && xx <= k.n + eps;
  };
  if (!in_window(t, x) || !in_window(t_prime, x_prime))
    throw std::domain_error("increment_bound: point outside the window of the constants");
  return k.c_np(star) * (std::pow(std::abs(t - t_prime), 0.25) + std::sqrt(std::abs(x - x_prime)));
}

}  // namespace roughshe
