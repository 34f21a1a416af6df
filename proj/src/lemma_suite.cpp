#include "roughshe/lemma_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "roughshe/error.hpp"
#include "roughshe/gaussian_kernel.hpp"
#include "roughshe/holder_constants.hpp"
#include "roughshe/quadrature.hpp"

namespace roughshe {

bool VerifyReport::all_pass() const {
  return std::all_of(lemmas.begin(), lemmas.end(), [](const LemmaResult& r) { return r.pass; });
}

namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kInequalityTol = 1e-10;
constexpr double kFault = 1e-6;
const QuadratureSpec kQuad{1e-12, 1e-10, 2000, 12};
// quadrature comparisons: |a - b| / max(|b|, abs_tol / rel_tol) against 10 rel_tol
constexpr double kQuadTol = 10.0 * 1e-10;
constexpr double kQuadFloor = 1e-12 / 1e-10;

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double u01() { return static_cast<double>(g() >> 11) * 0x1p-53; }
  double uniform(double a, double b) { return a + (b - a) * u01(); }
  // log-uniform on [a, b], a > 0
  double log_uniform(double a, double b) { return a * std::exp(std::log(b / a) * u01()); }
};

double log_gauss(double nu, double t, double x) { return -0.5 * std::log(2.0 * M_PI * nu * t) - x * x / (2.0 * nu * t); }

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}
double quad_err(double closed, double quad) { return std::abs(closed - quad) / std::max(std::abs(quad), kQuadFloor); }
// lhs <= rhs where lhs comes from quadrature: same floor as quad_err
double quad_excess(double lhs, double rhs) {
  if (lhs <= rhs) return 0.0;
  return (lhs - rhs) / std::max(std::abs(rhs), kQuadFloor);
}
// lhs <= rhs, relative
double excess(double lhs, double rhs) {
  if (lhs <= rhs) return 0.0;
  return (lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

struct Check {
  const char* id;
  const char* kind;
  bool faultable;
  // returns the violation of one trial; `fault` is 1 or 1 + 1e-6
  std::function<double(Rng&, double fault)> trial;
};

double tolerance_for(const std::string& kind) {
  if (kind == "quadrature") return kQuadTol;
  if (kind == "identity") return kIdentityTol;
  return kInequalityTol;
}

std::vector<Check> build_checks() {
  std::vector<Check> c;

  c.push_back({"mhr_growth", "inequality", false, [](Rng& r, double) {
                 const double c1 = r.log_uniform(0.1, 10.0);
                 const double c2 = r.log_uniform(0.1, 3.0);
                 const double a = r.uniform(1.0 + 1e-3, 1.95);
                 const double b = r.uniform(a + 0.02, 2.0);
                 const double x = r.uniform(-30.0, 30.0);
                 const double lhs = std::log(c1) + c2 * std::pow(std::abs(x), a);
                 const double rhs = std::log(c1) + std::pow(c2, b / (b - a)) + std::pow(std::abs(x), b);
                 return lhs <= rhs ? 0.0 : (lhs - rhs) / std::max(1.0, std::abs(rhs));
               }});

  auto sample_var = [](Rng& r, double& nu, double& s, double& t, double& x, double& y) {
    nu = r.log_uniform(0.2, 5.0);
    t = r.log_uniform(1e-3, 5.0);
    const double u = r.u01();
    s = u < 0.1 ? t : (u < 0.2 ? 0.0 : t * r.u01());
    x = r.uniform(-3.0, 3.0);
    y = r.u01() < 0.1 ? x : r.uniform(-3.0, 3.0);
  };
  c.push_back({"variation_spatial", "quadrature", false, [sample_var](Rng& r, double) {
                 double nu, s, t, x, y;
                 sample_var(r, nu, s, t, x, y);
                 const auto v = variation_integrals(nu, s, t, x, y, kQuad);
                 return quad_excess(v.spatial, VariationIntegrals::C1 * std::abs(x - y) / nu);
               }});
  c.push_back({"variation_temporal", "quadrature", false, [sample_var](Rng& r, double) {
                 double nu, s, t, x, y;
                 sample_var(r, nu, s, t, x, y);
                 const auto v = variation_integrals(nu, s, t, x, y, kQuad);
                 return quad_excess(v.temporal, VariationIntegrals::C2 * std::sqrt(t - s) / std::sqrt(nu));
               }});
  c.push_back({"variation_short_interval", "quadrature", true, [sample_var](Rng& r, double fault) {
                 double nu, s, t, x, y;
                 sample_var(r, nu, s, t, x, y);
                 const auto v = variation_integrals(nu, s, t, x, y, kQuad);
                 // int G^2(t-r, z) dz = G(2(t-r), 0)
                 auto f = [&](double, double d) { return d > 0.0 ? gauss(nu, 2.0 * d, 0.0) : 0.0; };
                 const double q = require_converged(integrate_sqrt_right(f, s, t, kQuad), "short interval");
                 const double bound = VariationIntegrals::C3 * std::sqrt(t - s) / std::sqrt(nu);
                 return std::max(quad_err(fault * v.short_interval, q), quad_err(v.short_interval, bound));
               }});
  c.push_back({"variation_combined", "quadrature", false, [sample_var](Rng& r, double) {
                 double nu, s, t, x, y;
                 sample_var(r, nu, s, t, x, y);
                 const auto v = variation_integrals(nu, s, t, x, y, kQuad);
                 return quad_excess(v.combined, 2.0 * VariationIntegrals::C1 *
                                               (std::abs(x - y) / nu + std::sqrt(t - s) / std::sqrt(nu)));
               }});

  c.push_back({"heat_kernel_product", "identity", true, [](Rng& r, double fault) {
                 const KernelParams p(r.log_uniform(0.2, 5.0));
                 double t, s, x, y, lhs, rhs;
                 // resample until both sides are representable
                 for (;;) {
                   t = r.uniform(1e-3, 10.0);
                   s = r.uniform(1e-3, 10.0);
                   x = r.uniform(-10.0, 10.0);
                   y = r.uniform(-10.0, 10.0);
                   const auto f = product_identity(p, t, s, x, y);
                   lhs = fault * heat_kernel(p, t, x) * heat_kernel(p, s, y);
                   rhs = heat_kernel(p, f.first.time, f.first.location) * heat_kernel(p, f.second.time, f.second.location);
                   if (rhs > 1e-280) break;
                 }
                 return rel_err(lhs, rhs);
               }});
  c.push_back({"heat_kernel_square", "identity", true, [](Rng& r, double fault) {
                 const KernelParams p(r.log_uniform(0.2, 5.0));
                 const double t = r.uniform(1e-3, 10.0);
                 const double x = r.uniform(-3.0, 3.0) * std::sqrt(p.nu * t);
                 const double g = heat_kernel(p, t, x);
                 return rel_err(fault * g * g, square_identity(p, t, x));
               }});
  c.push_back({"split_bound", "inequality", false, [](Rng& r, double) {
                 const double t = r.log_uniform(1e-3, 5.0);
                 const double s = r.log_uniform(1e-3, 5.0);
                 const double x = r.uniform(-3.0, 3.0);
                 const double z1 = r.uniform(-3.0, 3.0);
                 const double z2 = r.uniform(-3.0, 3.0);
                 const double m = std::max(4.0 * t, s);
                 const double lhs = log_gauss(1.0, t, x - 0.5 * (z1 + z2)) + log_gauss(1.0, s, z1 - z2);
                 const double rhs = std::log(m / std::sqrt(t * s)) + log_gauss(1.0, m, x - z1) + log_gauss(1.0, m, x - z2);
                 // logs: the excess is a relative error
                 return lhs <= rhs ? 0.0 : std::expm1(lhs - rhs);
               }});
  c.push_back({"semigroup", "quadrature", true, [](Rng& r, double fault) {
                 const double nu = r.log_uniform(0.2, 5.0);
                 const double t = r.log_uniform(1e-2, 10.0);
                 const double s = r.log_uniform(1e-2, 10.0);
                 const double x = r.uniform(-5.0, 5.0);
                 auto f = [&](double y) { return gauss(nu, t, x - y) * gauss(nu, s, y); };
                 const Feature feats[] = {{x, std::sqrt(nu * t)}, {0.0, std::sqrt(nu * s)}};
                 const double q = require_converged(integrate_line(f, std::span<const Feature>(feats), kQuad), "semigroup");
                 return quad_err(fault * heat_kernel(KernelParams(nu), t + s, x), q);
               }});
  c.push_back({"time_convolution", "quadrature", true, [](Rng& r, double fault) {
                 const double nu = r.log_uniform(0.2, 5.0);
                 const double sg = r.log_uniform(0.2, 5.0);
                 const double t = r.log_uniform(1e-2, 5.0);
                 const double x = r.u01() < 0.2 ? 0.0 : r.uniform(-2.0, 2.0);
                 const double y = r.u01() < 0.2 ? 0.0 : r.uniform(-2.0, 2.0);
                 auto f = [&](double s, double d) {
                   if (s <= 0.0 || d <= 0.0) return 0.0;
                   return gauss(nu, s, x) * gauss(sg, d, y);
                 };
                 const double q = require_converged(integrate_two_sided(f, t, kQuad), "time convolution");
                 return quad_err(fault * time_convolution_closed_form(nu, sg, t, x, y), q);
               }});
  c.push_back({"time_convolution_origin_bound", "inequality", false, [](Rng& r, double) {
                 const double nu = r.log_uniform(0.2, 5.0);
                 const double sg = r.log_uniform(0.2, 5.0);
                 const double t = r.log_uniform(1e-3, 5.0);
                 const double y = r.uniform(-3.0, 3.0) * std::sqrt(sg * t);
                 return excess(time_convolution_origin(nu, sg, t, y), time_convolution_origin_bound(nu, sg, t, y));
               }});
  c.push_back({"erfc_bound", "inequality", false, [](Rng& r, double) {
                 const double x = r.u01() < 0.5 ? r.uniform(0.0, 6.0) : r.uniform(0.0, 26.0);
                 return excess(erfc_fn(x), std::exp(-x * x));
               }});
  c.push_back({"time_integral", "quadrature", true, [](Rng& r, double fault) {
                 const double nu = r.log_uniform(0.2, 5.0);
                 const double t = r.log_uniform(1e-2, 5.0);
                 const double x = r.u01() < 0.2 ? 0.0 : r.uniform(-3.0, 3.0) * std::sqrt(nu * t);
                 auto f = [&](double s) { return s > 0.0 ? gauss(nu, s, x) : 0.0; };
                 const double q = require_converged(integrate_two_sided(f, t, kQuad), "time integral");
                 return quad_err(fault * time_integral_closed_form(nu, t, x), q);
               }});
  c.push_back({"gtxr_ratio", "inequality", false, [](Rng& r, double) {
                 double nu, t, n, x, g0;
                 do {
                   nu = r.log_uniform(0.2, 5.0);
                   t = r.log_uniform(1e-2, 5.0);
                   n = r.uniform(1.0 + 1e-6, 4.0);
                   x = r.uniform(-3.0, 3.0);
                   g0 = gauss(0.5 * nu, t, x);
                 } while (!(g0 > 1e-250));
                 const double rr = r.uniform(0.0, n * n * t);
                 const double lhs = std::abs(gauss(0.5 * nu, t + rr, x) / g0 - 1.0);
                 const double mid = 3.0 * rr / (t + rr) * std::exp(n * n * x * x / (nu * t * (1.0 + n * n)));
                 const double right = 1.5 * std::sqrt(rr * (1.0 + n * n)) / std::sqrt(t) *
                                      gauss(0.5 * nu * (1.0 + n * n), t, x) / g0;
                 return std::max(excess(lhs, mid), excess(mid, right));
               }});
  c.push_back({"arcsin_integral", "quadrature", true, [](Rng& r, double fault) {
                 const double tp = r.log_uniform(1e-2, 10.0);
                 const double t = r.u01() < 0.2 ? 0.0 : tp * r.u01();
                 // u = s - t, d = t' - s
                 auto f = [&](double u, double d) {
                   const double s = t + u;
                   return s > 0.0 && d > 0.0 ? 1.0 / std::sqrt(s * d) : 0.0;
                 };
                 const double q = require_converged(integrate_two_sided(f, tp - t, kQuad), "arcsin integral");
                 return quad_err(fault * arcsin_time_integral(t, tp), q);
               }});
  c.push_back({"beta_integral", "quadrature", true, [](Rng& r, double fault) {
                 const double mu = r.uniform(0.5, 3.0);
                 const double nv = r.uniform(0.5, 3.0);
                 const double t = r.log_uniform(0.1, 5.0);
                 auto f = [&](double s, double d) {
                   if (s <= 0.0 || d <= 0.0) return 0.0;
                   return std::pow(s, mu - 1.0) * std::pow(d, nv - 1.0);
                 };
                 const double q = require_converged(integrate_two_sided(f, t, kQuad), "beta integral");
                 return quad_err(fault * beta_time_integral(mu, nv, t), q);
               }});
  c.push_back({"sup_ratio_constant", "inequality", false, [](Rng& r, double) {
                 static const double C = sup_ratio_constant();
                 double v = 0.0;
                 if (C < 0.45125) v = (0.45125 - C) / 0.45125;
                 if (C > 0.45126) v = (C - 0.45126) / 0.45126;
                 const double x = r.u01() < 0.5 ? r.uniform(-3.0, 3.0) : r.uniform(-50.0, 50.0);
                 if (x == 0.0) return v;
                 return std::max(v, excess(-std::expm1(-0.5 * x * x) / std::abs(x), C));
               }});
  auto grad_sample = [](Rng& r, double& nu, double& t, double& x, double& L, double& beta, double& h) {
    nu = r.log_uniform(0.2, 5.0);
    t = r.log_uniform(1e-2, 3.0);
    L = r.log_uniform(0.1, 3.0);
    beta = r.uniform(0.01, 0.99);
    x = r.uniform(-4.0, 4.0);
    h = r.uniform(-beta * L, beta * L);
  };
  c.push_back({"gradient_bound_first", "inequality", false, [grad_sample](Rng& r, double) {
                 double nu, t, x, L, beta, h;
                 grad_sample(r, nu, t, x, L, beta, h);
                 const double lhs = std::abs(gauss(nu, t, x + h) - gauss(nu, t, x));
                 return excess(lhs, std::abs(h) * gradient_envelope(nu, t, x, L, beta));
               }});
  c.push_back({"gradient_bound_second", "inequality", false, [grad_sample](Rng& r, double) {
                 double nu, t, x, L, beta, h;
                 grad_sample(r, nu, t, x, L, beta, h);
                 const double lhs = std::abs(gauss(nu, t, x + h) + gauss(nu, t, x - h) - 2.0 * gauss(nu, t, x));
                 return excess(lhs, 2.0 * std::abs(h) * gradient_envelope(nu, t, x, L, beta));
               }});
  c.push_back({"lin_exp", "inequality", false, [](Rng& r, double) {
                 const double a = r.uniform(1.0, 3.0);
                 const double bcrit = 1.0 / (a * M_E);
                 const double b = r.u01() < 0.2 ? bcrit : bcrit * (1.0 + 2.0 * r.u01());
                 // near the tangency point half the time
                 const double x = r.u01() < 0.5 ? std::exp(1.0 / a) * r.uniform(0.9, 1.1) : r.uniform(-50.0, 50.0);
                 if (x == 0.0) return 0.0;
                 const double lhs = std::log(std::abs(x));
                 const double rhs = b * std::pow(std::abs(x), a);
                 return lhs <= rhs ? 0.0 : (lhs - rhs) / std::max(1.0, std::abs(rhs));
               }});
  auto dg_sample = [](Rng& r, double& a, double& cc, double& n) {
    a = r.uniform(1.0 + 1e-3, 2.0);
    cc = r.log_uniform(0.1, 2.0);
    n = r.log_uniform(0.5, 3.0);
  };
  c.push_back({"delta_g_time", "inequality", false, [dg_sample](Rng& r, double) {
                 double a, cc, n;
                 dg_sample(r, a, cc, n);
                 const auto d = delta_g_constants(n, a, cc);
                 auto g = [&](double v) { return std::exp(cc * std::pow(std::abs(v), a)); };
                 const double x = r.uniform(-3.0, 3.0), z = r.uniform(-3.0, 3.0);
                 double t = r.uniform(0.0, n), tp = r.uniform(0.0, n);
                 if (t > tp) std::swap(t, tp);
                 const double lhs = std::abs(g(x - std::sqrt(t) * z) - g(x - std::sqrt(tp) * z));
                 const double rhs = a * cc * std::exp(d.c1 * std::pow(std::abs(x), a) + d.c2 * std::pow(std::abs(z), a)) *
                                    std::sqrt(tp - t);
                 return excess(lhs, rhs);
               }});
  c.push_back({"delta_g_space", "inequality", false, [dg_sample](Rng& r, double) {
                 double a, cc, n;
                 dg_sample(r, a, cc, n);
                 const auto d = delta_g_constants(n, a, cc);
                 auto g = [&](double v) { return std::exp(cc * std::pow(std::abs(v), a)); };
                 const double x = r.uniform(-n, n), xp = r.uniform(-n, n), z = r.uniform(-3.0, 3.0);
                 const double t = r.uniform(0.0, n);
                 const double lhs = std::abs(g(x - std::sqrt(t) * z) - g(xp - std::sqrt(t) * z));
                 const double rhs = d.c3 * std::exp(d.c4 * std::pow(std::abs(z), a)) * std::abs(xp - x);
                 return excess(lhs, rhs);
               }});
  return c;
}

const std::vector<Check>& checks() {
  static const std::vector<Check> c = build_checks();
  return c;
}

}  // namespace

const std::vector<std::string>& lemma_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& c : checks()) v.emplace_back(c.id);
    return v;
  }();
  return ids;
}

VerifyReport run_verify(const VerifyOptions& opt) {
  if (opt.trials < 1) throw ValidationError("trials", "must be >= 1");
  if (!opt.inject_fault.empty()) {
    const auto& cs = checks();
    auto it = std::find_if(cs.begin(), cs.end(), [&](const Check& c) { return opt.inject_fault == c.id; });
    if (it == cs.end()) throw ValidationError("inject_fault", "unknown lemma id '" + opt.inject_fault + "'");
    if (!it->faultable)
      throw ValidationError("inject_fault", "'" + opt.inject_fault + "' is an inequality; pick an identity or quadrature check");
  }
  VerifyReport rep;
  rep.seed = opt.seed;
  rep.trials = opt.trials;
  rep.injected_fault = opt.inject_fault;
  std::uint64_t k = 0;
  for (const auto& c : checks()) {
    // each check has its own stream so adding checks does not shift the others
    Rng rng(opt.seed ^ (0x9E3779B97F4A7C15ull * ++k));
    const double fault = opt.inject_fault == c.id ? 1.0 + kFault : 1.0;
    LemmaResult res;
    res.id = c.id;
    res.kind = c.kind;
    res.tolerance = tolerance_for(res.kind);
    try {
      for (int i = 0; i < opt.trials; ++i) {
        const double v = c.trial(rng, fault);
        if (!(v <= res.max_violation)) res.max_violation = std::isnan(v) ? INFINITY : v;
        ++res.trials;
      }
    } catch (const std::exception& e) {
      res.note = e.what();
      res.max_violation = INFINITY;
    }
    res.pass = res.trials == opt.trials && res.max_violation < res.tolerance;
    rep.lemmas.push_back(std::move(res));
  }
  return rep;
}

}  // namespace roughshe
