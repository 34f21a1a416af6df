#include "roughshe/moment_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "roughshe/gaussian_kernel.hpp"

namespace roughshe {

MomentKernel::MomentKernel(double nu_, double lam_) : nu(nu_), lam(lam_) {
  if (!(nu_ > 0.0) || !std::isfinite(nu_)) throw std::domain_error("MomentKernel: nu must be positive");
  if (!std::isfinite(lam_)) throw std::domain_error("MomentKernel: lam must be finite");
}

namespace {

// e^{lam^4 t/(4nu)} Phi(lam^2 sqrt(t/(2nu)))
double growth_factor(const MomentKernel& mk, double t) {
  const double l2 = mk.lam * mk.lam;
  return std::exp(l2 * l2 * t / (4.0 * mk.nu)) * std_normal_cdf(l2 * std::sqrt(t / (2.0 * mk.nu)));
}

}  // namespace

double kernel_K(const MomentKernel& mk, double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("kernel_K: t must be positive");
  const double l2 = mk.lam * mk.lam;
  if (l2 == 0.0) return 0.0;
  const double bracket = l2 / std::sqrt(4.0 * M_PI * mk.nu * t) + (l2 * l2 / (2.0 * mk.nu)) * growth_factor(mk, t);
  return gauss(mk.nu / 2.0, t, x) * bracket;
}

double kernel_H(const MomentKernel& mk, double t) {
  if (!(t >= 0.0)) throw std::domain_error("kernel_H: t must be nonnegative");
  const double l2 = mk.lam * mk.lam;
  const double A = l2 * l2 * t / (4.0 * mk.nu);
  const double B = l2 * std::sqrt(t / (2.0 * mk.nu));
  // 2 e^A Phi(B) - 1 rearranged to avoid cancellation at small t
  return 2.0 * std::expm1(A) * std_normal_cdf(B) + std::erf(B / M_SQRT2);
}

double upsilon(const MomentKernel& mk, double t) {
  if (!(t >= 0.0)) throw std::domain_error("upsilon: t must be nonnegative");
  const double l2 = mk.lam * mk.lam;
  return l2 + l2 * l2 * std::sqrt(M_PI * t / mk.nu) * growth_factor(mk, t);
}

RhoSpec RhoSpec::quasi_linear(double lam, double varrho) {
  RhoSpec r;
  r.mode = RhoMode::quasi_linear;
  r.lam = lam;
  r.varrho = varrho;
  r.name = "quasi_linear";
  return r;
}

RhoSpec RhoSpec::lipschitz_bound(double lip, double vip) {
  RhoSpec r;
  r.mode = RhoMode::lipschitz_bound;
  r.lip = lip;
  r.vip = vip;
  r.name = "lipschitz_bound";
  return r;
}

RhoSpec RhoSpec::custom(std::string name, std::function<double(double)> fn, double lip, double vip) {
  RhoSpec r;
  r.mode = RhoMode::custom;
  r.name = std::move(name);
  r.fn = std::move(fn);
  r.lip = lip;
  r.vip = vip;
  return r;
}

RhoSpec RhoSpec::additive(double vip) {
  // |vip|^2 <= 1^2 (vip^2 + u^2)
  return custom("additive", [vip](double) { return vip; }, 1.0, std::abs(vip));
}

RhoSpec RhoSpec::zero() {
  return custom("zero", [](double) { return 0.0; }, 1.0, 0.0);
}

double RhoSpec::operator()(double u) const {
  switch (mode) {
    case RhoMode::quasi_linear:
      return varrho == 0.0 ? lam * u : lam * std::sqrt(varrho * varrho + u * u);
    case RhoMode::lipschitz_bound:
      return vip == 0.0 ? lip * u : lip * std::sqrt(vip * vip + u * u);
    case RhoMode::custom:
      return fn ? fn(u) : 0.0;
  }
  return 0.0;
}

bool RhoSpec::vanishes_at_zero() const { return (*this)(0.0) == 0.0; }

void RhoSpec::validate(const std::string& path) const {
  switch (mode) {
    case RhoMode::quasi_linear:
      if (!std::isfinite(lam)) throw ValidationError(path + ".lam", "must be finite");
      if (!(varrho >= 0.0) || !std::isfinite(varrho)) throw ValidationError(path + ".varrho", "must be >= 0");
      break;
    case RhoMode::lipschitz_bound:
    case RhoMode::custom:
      if (!(lip > 0.0) || !std::isfinite(lip)) throw ValidationError(path + ".lip", "must be positive");
      if (!(vip >= 0.0) || !std::isfinite(vip)) throw ValidationError(path + ".vip", "must be >= 0");
      if (mode == RhoMode::custom && !fn) throw ValidationError(path + ".name", "custom rho has no function");
      break;
  }
  if (LIP && !(*LIP >= 0.0)) throw ValidationError(path + ".LIP", "must be >= 0");
}

BdgConstants bdg_constants(int p, double vip) {
  if (p < 2 || p % 2 != 0) throw std::domain_error("bdg_constants: p must be an even integer >= 2");
  if (p == 2) return {1.0, 1.0};
  const double z = 2.0 * std::sqrt(static_cast<double>(p));
  const double a = vip == 0.0 ? std::sqrt(2.0) : std::pow(2.0, (p - 1.0) / p);
  return {z, a};
}

namespace {

void measure_features(const InitialMeasure& m, double nu, double s, std::vector<Feature>& out) {
  const double w = std::sqrt(nu * s);
  for (const auto& at : m.atoms) out.push_back({at.x, std::sqrt(0.5) * w});
  if (!m.density) return;
  const auto& d = *m.density;
  switch (d.kind) {
    case DensityKind::constant: break;
    case DensityKind::power_law:
    case DensityKind::exponential_growth: out.push_back({0.0, w}); break;
    case DensityKind::holder_test: {
      const double knee = std::pow(d.cap, 1.0 / d.a);
      out.push_back({0.0, w});
      out.push_back({knee, w});
      out.push_back({-knee, w});
      break;
    }
    case DensityKind::tabulated:
      out.push_back({d.xs.front(), w});
      out.push_back({d.xs.back(), w});
      out.push_back({0.5 * (d.xs.front() + d.xs.back()), std::max(w, 0.5 * (d.xs.back() - d.xs.front()))});
      break;
  }
}

double generic_conv(const InitialMeasure& m, const MomentKernel& mk, double t, double x, const MomentOptions& opt) {
  const double nu = mk.nu;
  if (mk.lam == 0.0) return 0.0;
  const QuadratureSpec j0spec{1e-15, 1e-12, 2000, opt.inner.gaussian_tail_sigmas};
  std::vector<Feature> feats;
  auto outer = [&](double s, double tau) {
    if (!(tau > 0.0) || !(s > 0.0)) return 0.0;
    feats.clear();
    feats.push_back({x, std::sqrt(0.5 * nu * tau)});
    measure_features(m, nu, s, feats);
    auto inner = [&](double y) {
      const double j = j0(m, nu, s, y, false, j0spec);
      return j * j * gauss(0.5 * nu, tau, x - y);
    };
    const double in = require_converged(integrate_line(inner, std::span<const Feature>(feats), opt.inner),
                                        "j0sq_star_K.inner");
    return upsilon(mk, tau) / std::sqrt(4.0 * M_PI * nu * tau) * in;
  };
  return require_converged(integrate_two_sided(outer, t, opt.outer), "j0sq_star_K.outer");
}

// (J0^2 * K) with closed forms where the structure allows; K and lam refer to mk
double conv_dispatch(const InitialMeasure& m, const MomentKernel& mk, double t, double x, const MomentOptions& opt) {
  if (mk.lam == 0.0) return 0.0;
  if (!opt.force_generic) {
    if (m.is_single_atom()) {
      const auto at = m.atoms[0];
      const double l2 = mk.lam * mk.lam;
      // w^2 (K/lam^2 - G^2); the bracket of K minus its leading term, times G_{nu/2}
      const double tail = (l2 / (2.0 * mk.nu)) * growth_factor(mk, t) * gauss(mk.nu / 2.0, t, x - at.x);
      return at.w * at.w * tail;
    }
    if (m.is_constant_density()) {
      const double c = m.density->scale * m.density->c;
      return c * c * kernel_H(mk, t);
    }
  }
  return generic_conv(m, mk, t, x, opt);
}

}  // namespace

double j0sq_star_K(const InitialMeasure& m, const MomentKernel& mk, double t, double x, const MomentOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("j0sq_star_K: t must be positive");
  if (!classify(m).in_MH) throw ValidationError("measure", "not in M_H");
  return conv_dispatch(m, mk, t, x, opt);
}

double exact_second_moment(const InitialMeasure& m, const MomentKernel& mk, double vv, double t, double x,
                           const MomentOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("exact_second_moment: t must be positive");
  if (!(vv >= 0.0)) throw std::domain_error("exact_second_moment: varrho must be >= 0");
  if (!classify(m).in_MH) throw ValidationError("measure", "not in M_H");
  const double j = j0(m, mk.nu, t, x);
  return j * j + conv_dispatch(m, mk, t, x, opt) + vv * vv * kernel_H(mk, t);
}

double pmoment_upper_bound(const InitialMeasure& m, const RhoSpec& rho, double nu, int p, double t, double x,
                           const MomentOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("pmoment_upper_bound: t must be positive");
  rho.validate();
  if (!classify(m).in_MH) throw ValidationError("measure", "not in M_H");
  const double lip = rho.lip_rho();
  const double vip = rho.vip_rho();
  const auto bdg = bdg_constants(p, vip);
  const double j = j0(m, nu, t, x);
  if (p == 2) {
    const MomentKernel kb(nu, lip);
    return j * j + conv_dispatch(m, kb, t, x, opt) + vip * vip * kernel_H(kb, t);
  }
  const MomentKernel kh(nu, bdg.a_p_vip * bdg.z_p_bound * lip);
  const double b = 2.0 * j * j + 2.0 * conv_dispatch(m, kh, t, x, opt) + vip * vip * kernel_H(kh, t);
  // e^{lam^4 t / 4nu} leaves double range quickly as p grows
  if (!std::isfinite(b)) throw NumericalError("pmoment_upper_bound: bound exceeds double range");
  return b;
}

double delta_I_second_moment(const MomentKernel& mk, double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("delta_I_second_moment: t must be positive");
  if (mk.lam == 0.0) throw std::domain_error("delta_I_second_moment: lam must be nonzero");
  const double l2 = mk.lam * mk.lam;
  return (l2 / (2.0 * mk.nu)) * growth_factor(mk, t) * gauss(mk.nu / 2.0, t, x);
}

PowerLawScaling power_law_scaling(double a, const MomentKernel& mk, const std::vector<double>& t_grid,
                                  const MomentOptions& opt) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("power_law_scaling: a must be in (0,1)");
  if (t_grid.size() < 2) throw ValidationError("t_grid", "needs at least two times");
  double tmin = t_grid.front(), tmax = t_grid.front();
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ValidationError("t_grid", "times must be positive");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (std::log10(tmax / tmin) < 1.5 - 1e-12) throw ValidationError("t_grid", "must span at least 1.5 decades");
  const auto m = InitialMeasure::with_density(DensitySpec::power_law(a));
  PowerLawScaling out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double t : t_grid) {
    const double v = std::sqrt(j0sq_star_K(m, mk, t, 0.0, opt));
    out.values.push_back(v);
    const double lx = std::log(t), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(t_grid.size());
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw NumericalError("power_law_scaling: degenerate time grid");
  out.exponent_fit = (n * sxy - sx * sy) / den;
  return out;
}

}  // namespace roughshe
