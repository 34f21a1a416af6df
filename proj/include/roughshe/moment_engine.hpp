#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roughshe/initial_data.hpp"
#include "roughshe/quadrature.hpp"

namespace roughshe {

struct MomentKernel {
  double nu;
  double lam;
  MomentKernel(double nu_, double lam_);
};

// K(t,x) = G_{nu/2}(t,x) (lam^2/sqrt(4 pi nu t) + lam^4/(2nu) e^{lam^4 t/(4nu)} Phi(lam^2 sqrt(t/(2nu))))
double kernel_K(const MomentKernel& mk, double t, double x);
// H(t) = 2 e^{lam^4 t/(4nu)} Phi(lam^2 sqrt(t/(2nu))) - 1
double kernel_H(const MomentKernel& mk, double t);
// K(t,x) = upsilon(t) G_nu(t,x)^2
double upsilon(const MomentKernel& mk, double t);

enum class RhoMode { quasi_linear, lipschitz_bound, custom };

// Diffusion coefficient rho. quasi_linear has |rho(u)|^2 = lam^2 (varrho^2 + u^2);
// lipschitz_bound declares |rho(u)|^2 <= Lip^2 (vip^2 + u^2) and is simulated
// with the saturating choice rho(u) = Lip sqrt(vip^2 + u^2).
struct RhoSpec {
  RhoMode mode = RhoMode::quasi_linear;
  double lam = 1.0;
  double varrho = 0.0;
  double lip = 1.0;
  double vip = 0.0;
  std::optional<double> LIP;
  std::string name;  // custom modes: "additive", "zero", or user-registered
  std::function<double(double)> fn;

  static RhoSpec quasi_linear(double lam, double varrho = 0.0);
  static RhoSpec pam(double lam = 1.0) { return quasi_linear(lam, 0.0); }
  static RhoSpec lipschitz_bound(double lip, double vip);
  static RhoSpec custom(std::string name, std::function<double(double)> fn, double lip, double vip);
  static RhoSpec additive(double vip);
  static RhoSpec zero();

  double operator()(double u) const;
  double lip_rho() const { return mode == RhoMode::quasi_linear ? std::abs(lam) : lip; }
  double vip_rho() const { return mode == RhoMode::quasi_linear ? varrho : vip; }
  bool vanishes_at_zero() const;
  void validate(const std::string& path = "rho") const;
};

struct BdgConstants {
  double z_p_bound;
  double a_p_vip;
};
BdgConstants bdg_constants(int p, double vip);

struct MomentOptions {
  // outer time integral and inner space integral of (J0^2 * K)
  QuadratureSpec outer{1e-12, 1e-7, 400, 12.0};
  QuadratureSpec inner{1e-14, 1e-9, 400, 12.0};
  // skip the closed forms for a single atom / constant density
  bool force_generic = false;
};

// (J0^2 * K)(t,x) = int_0^t ds int dy J0(s,y)^2 K(t-s, x-y), by nested quadrature.
double j0sq_star_K(const InitialMeasure& m, const MomentKernel& mk, double t, double x,
                   const MomentOptions& opt = {});

// E[u(t,x)^2] for quasi-linear rho (lam = mk.lam, varrho = vv).
double exact_second_moment(const InitialMeasure& m, const MomentKernel& mk, double vv, double t, double x,
                           const MomentOptions& opt = {});

// Upper bound on ||u(t,x)||_p^2 (not an estimate of the moment).
double pmoment_upper_bound(const InitialMeasure& m, const RhoSpec& rho, double nu, int p, double t, double x,
                           const MomentOptions& opt = {});

// ||I(t,x)||_2^2 for mu = delta_0
double delta_I_second_moment(const MomentKernel& mk, double t, double x);

struct PowerLawScaling {
  double exponent_fit;          // slope of log ||I(t,0)||_2 against log t
  std::vector<double> values;   // ||I(t,0)||_2 on the grid
};
PowerLawScaling power_law_scaling(double a, const MomentKernel& mk, const std::vector<double>& t_grid,
                                  const MomentOptions& opt = {});

}  // namespace roughshe
