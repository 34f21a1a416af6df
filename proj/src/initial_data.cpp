#include "roughshe/initial_data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "roughshe/gaussian_kernel.hpp"

namespace roughshe {

const char* to_string(DensityKind k) {
  switch (k) {
    case DensityKind::constant: return "constant";
    case DensityKind::power_law: return "power_law";
    case DensityKind::exponential_growth: return "exponential_growth";
    case DensityKind::holder_test: return "holder_test";
    case DensityKind::tabulated: return "tabulated";
  }
  return "?";
}

DensityKind density_kind_from_string(const std::string& s) {
  if (s == "constant") return DensityKind::constant;
  if (s == "power_law") return DensityKind::power_law;
  if (s == "exponential_growth") return DensityKind::exponential_growth;
  if (s == "holder_test") return DensityKind::holder_test;
  if (s == "tabulated") return DensityKind::tabulated;
  throw ValidationError("density.kind", "unknown kind '" + s + "'");
}

DensitySpec DensitySpec::constant(double c) {
  DensitySpec d;
  d.kind = DensityKind::constant;
  d.c = c;
  return d;
}

DensitySpec DensitySpec::power_law(double a) {
  DensitySpec d;
  d.kind = DensityKind::power_law;
  d.a = a;
  return d;
}

DensitySpec DensitySpec::exponential_growth(double c1, double c2, double a) {
  DensitySpec d;
  d.kind = DensityKind::exponential_growth;
  d.c = c1;
  d.c2 = c2;
  d.a = a;
  return d;
}

DensitySpec DensitySpec::holder_test(double alpha, double cap) {
  DensitySpec d;
  d.kind = DensityKind::holder_test;
  d.a = alpha;
  d.cap = cap;
  return d;
}

DensitySpec DensitySpec::tabulated(std::vector<double> xs, std::vector<double> fs) {
  DensitySpec d;
  d.kind = DensityKind::tabulated;
  d.xs = std::move(xs);
  d.fs = std::move(fs);
  return d;
}

DensitySpec DensitySpec::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("density.table", "cannot open '" + path + "'");
  std::vector<double> xs, fs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    double x, f;
    if (!(ls >> x >> f)) {
      if (lineno == 1) continue;  // header
      throw ValidationError("density.table", "bad row at line " + std::to_string(lineno));
    }
    xs.push_back(x);
    fs.push_back(f);
  }
  auto d = tabulated(std::move(xs), std::move(fs));
  d.validate("density.table");
  return d;
}

double DensitySpec::operator()(double x) const {
  switch (kind) {
    case DensityKind::constant: return scale * c;
    case DensityKind::power_law: return scale * std::pow(std::abs(x), -a);
    case DensityKind::exponential_growth: return scale * c * std::exp(c2 * std::pow(std::abs(x), a));
    case DensityKind::holder_test: return scale * std::min(std::pow(std::abs(x), a), cap);
    case DensityKind::tabulated: {
      if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      if (it == xs.end()) return scale * fs.back();
      const std::size_t i = static_cast<std::size_t>(it - xs.begin());
      if (i == 0) return scale * fs.front();
      const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return scale * ((1.0 - w) * fs[i - 1] + w * fs[i]);
    }
  }
  return 0.0;
}

void DensitySpec::validate(const std::string& path) const {
  if (!std::isfinite(scale) || scale == 0.0) throw ValidationError(path + ".scale", "must be finite and nonzero");
  switch (kind) {
    case DensityKind::constant:
      if (!std::isfinite(c)) throw ValidationError(path + ".c", "must be finite");
      break;
    case DensityKind::power_law:
      if (!(a > 0.0 && a <= 1.0)) throw ValidationError(path + ".a", "power_law needs 0 < a <= 1");
      break;
    case DensityKind::exponential_growth:
      if (!(a >= 1.0 && a < 2.0))
        throw ValidationError(path + ".a", "exponential_growth needs 1 <= a < 2 (a >= 2 is outside M_H)");
      if (!(c > 0.0 && std::isfinite(c))) throw ValidationError(path + ".c", "must be positive");
      if (!(c2 > 0.0 && std::isfinite(c2))) throw ValidationError(path + ".c2", "must be positive");
      break;
    case DensityKind::holder_test:
      if (!(a > 0.0 && a <= 1.0)) throw ValidationError(path + ".a", "holder_test needs 0 < alpha <= 1");
      if (!(cap > 0.0 && std::isfinite(cap))) throw ValidationError(path + ".cap", "must be positive");
      break;
    case DensityKind::tabulated:
      if (xs.size() < 2 || xs.size() != fs.size())
        throw ValidationError(path + ".table", "needs at least two (x, f) rows");
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(fs[i])) throw ValidationError(path + ".table", "non-finite entry");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ValidationError(path + ".table", "x must be strictly increasing");
      }
      break;
  }
}

InitialMeasure InitialMeasure::dirac(double x0, double w) {
  InitialMeasure m;
  m.atoms.push_back({x0, w});
  m.label = "dirac";
  return m;
}

InitialMeasure InitialMeasure::lebesgue(double c) {
  return with_density(DensitySpec::constant(c), "lebesgue");
}

InitialMeasure InitialMeasure::with_density(DensitySpec d, std::string label) {
  InitialMeasure m;
  if (label.empty()) label = to_string(d.kind);
  m.density = std::move(d);
  m.label = std::move(label);
  return m;
}

InitialMeasure InitialMeasure::abs_view() const {
  InitialMeasure m = *this;
  for (auto& at : m.atoms) at.w = std::abs(at.w);
  if (m.density) {
    m.density->scale = std::abs(m.density->scale);
    auto& d = *m.density;
    if (d.kind == DensityKind::constant) d.c = std::abs(d.c);
    if (d.kind == DensityKind::tabulated) {
      // |linear interpolant| is piecewise linear once the zero crossings are nodes
      std::vector<double> xs{d.xs.front()}, fs{std::abs(d.fs.front())};
      for (std::size_t i = 0; i + 1 < d.xs.size(); ++i) {
        const double f0 = d.fs[i], f1 = d.fs[i + 1];
        if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
          xs.push_back(d.xs[i] + (d.xs[i + 1] - d.xs[i]) * f0 / (f0 - f1));
          fs.push_back(0.0);
        }
        xs.push_back(d.xs[i + 1]);
        fs.push_back(std::abs(f1));
      }
      d.xs = std::move(xs);
      d.fs = std::move(fs);
    }
  }
  return m;
}

void InitialMeasure::validate(const std::string& path) const {
  if (atoms.empty() && !density) throw ValidationError(path, "needs atoms or a density");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto p = path + ".atoms[" + std::to_string(i) + "]";
    if (!std::isfinite(atoms[i].x)) throw ValidationError(p, "location must be finite");
    if (!std::isfinite(atoms[i].w) || atoms[i].w == 0.0) throw ValidationError(p, "weight must be finite and nonzero");
  }
  if (density) density->validate(path + ".density");
}

GrowthClass classify(const InitialMeasure& m) {
  m.validate();
  GrowthClass g;
  g.in_MH = true;
  if (!m.density) return g;
  const auto& d = *m.density;
  const bool pure = m.atoms.empty();
  switch (d.kind) {
    case DensityKind::constant:
      g.bounded_density = pure;
      g.holder_alpha = 1.0;
      break;
    case DensityKind::holder_test:
      g.bounded_density = pure;
      g.holder_alpha = d.a;
      break;
    case DensityKind::tabulated:
      g.bounded_density = pure;
      if (d.fs.front() == 0.0 && d.fs.back() == 0.0) g.holder_alpha = 1.0;
      break;
    case DensityKind::power_law:
      // |x|^{-1} is not locally integrable at the origin
      g.in_MH = d.a < 1.0;
      break;
    case DensityKind::exponential_growth:
      g.in_MH_star = pure;
      break;
  }
  if (g.bounded_density) g.in_MH_star = true;
  if (!pure) g.holder_alpha.reset();
  return g;
}

StarGrowth star_growth(const InitialMeasure& m) {
  const auto g = classify(m);
  if (!g.in_MH_star) throw ValidationError("measure", "not in M_H*: needs an absolutely continuous measure with at most exp(|x|^a) growth");
  const auto& d = *m.density;
  const double s = std::abs(d.scale);
  switch (d.kind) {
    case DensityKind::constant: return {1.5, s * std::abs(d.c)};
    case DensityKind::holder_test: return {1.5, s * d.cap};
    case DensityKind::tabulated: {
      double mx = 0.0;
      for (double f : d.fs) mx = std::max(mx, std::abs(f));
      return {1.5, s * mx};
    }
    case DensityKind::exponential_growth: {
      // c1 exp(c2|x|^a) <= c1 exp(c2^{b/(b-a)}) exp(|x|^b) for b in (a, 2)
      const double b = 0.5 * (d.a + 2.0);
      return {b, s * d.c * std::exp(std::pow(d.c2, b / (b - d.a)))};
    }
    default: break;
  }
  throw ValidationError("measure", "no star growth bound for this density");
}

namespace {

// int_a^b (p + q y) G_nu(t, x - y) dy in closed form
double linear_segment(double p, double q, double ya, double yb, double nu, double t, double x) {
  const double sig = std::sqrt(nu * t);
  const double ua = (ya - x) / sig;
  const double ub = (yb - x) / sig;
  double mass;
  if (ua >= 0.0) {
    mass = 0.5 * (std::erfc(ua / M_SQRT2) - std::erfc(ub / M_SQRT2));
  } else if (ub <= 0.0) {
    mass = 0.5 * (std::erfc(-ub / M_SQRT2) - std::erfc(-ua / M_SQRT2));
  } else {
    mass = 1.0 - 0.5 * (std::erfc(-ua / M_SQRT2) + std::erfc(ub / M_SQRT2));
  }
  const double phia = std::exp(-0.5 * ua * ua) / std::sqrt(2.0 * M_PI);
  const double phib = std::exp(-0.5 * ub * ub) / std::sqrt(2.0 * M_PI);
  return (p + q * x) * mass + q * sig * (phia - phib);
}

double tabulated_j0(const DensitySpec& d, double nu, double t, double x, bool use_abs) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < d.xs.size(); ++i) {
    const double x0 = d.xs[i], x1 = d.xs[i + 1];
    const double f0 = d.fs[i], f1 = d.fs[i + 1];
    auto add = [&](double ya, double yb, double fa, double fb, double sign) {
      if (!(yb > ya)) return;
      const double q = (fb - fa) / (yb - ya);
      const double p = fa - q * ya;
      total += sign * linear_segment(p, q, ya, yb, nu, t, x);
    };
    if (!use_abs || (f0 >= 0.0 && f1 >= 0.0)) {
      add(x0, x1, f0, f1, 1.0);
    } else if (f0 <= 0.0 && f1 <= 0.0) {
      add(x0, x1, f0, f1, -1.0);
    } else {
      const double xc = x0 + (x1 - x0) * f0 / (f0 - f1);
      add(x0, xc, f0, 0.0, f0 > 0.0 ? 1.0 : -1.0);
      add(xc, x1, 0.0, f1, f1 > 0.0 ? 1.0 : -1.0);
    }
  }
  return total;
}

// E|x + sqrt(nu t) Z|^{-a}; the Kummer form
double power_law_j0(double a, double nu, double t, double x) {
  const double z = x * x / (2.0 * nu * t);
  return std::tgamma(0.5 * (1.0 - a)) / (std::sqrt(M_PI) * std::pow(2.0 * nu * t, 0.5 * a)) *
         boost::math::hypergeometric_1F1(0.5 * a, 0.5, -z);
}

// rough location of the maximum of c2|y|^a - (y - x)^2 / (2 nu t)
double tilted_peak(double c2, double a, double nu, double t, double x) {
  double y = x;
  for (int i = 0; i < 60; ++i) {
    const double ay = std::max(std::abs(y), 1e-12);
    const double next = x + nu * t * c2 * a * std::pow(ay, a - 1.0) * (y >= 0.0 ? 1.0 : -1.0);
    if (std::abs(next - y) < 1e-12 * (1.0 + std::abs(y))) return next;
    y = 0.5 * (y + next);
  }
  return y;
}

double density_j0(const DensitySpec& d, double nu, double t, double x, bool use_abs, const QuadratureSpec& spec) {
  const double s = use_abs ? std::abs(d.scale) : d.scale;
  const double sig = std::sqrt(nu * t);
  switch (d.kind) {
    case DensityKind::constant: return s * (use_abs ? std::abs(d.c) : d.c);
    case DensityKind::power_law: return s * power_law_j0(d.a, nu, t, x);
    case DensityKind::tabulated: return s * tabulated_j0(d, nu, t, x, use_abs);
    case DensityKind::exponential_growth: {
      const double peak = tilted_peak(d.c2, d.a, nu, t, x);
      const Feature feats[] = {{x, sig}, {0.0, std::min(sig, 1.0)}, {peak, sig}};
      auto f = [&](double y) { return d.c * std::exp(d.c2 * std::pow(std::abs(y), d.a)) * gauss(nu, t, x - y); };
      return s * require_converged(integrate_line(f, std::span<const Feature>(feats), spec), "j0.exponential_growth");
    }
    case DensityKind::holder_test: {
      const double knee = std::pow(d.cap, 1.0 / d.a);
      const Feature feats[] = {{x, sig}, {0.0, std::min(sig, 0.25 * knee)}, {knee, sig}, {-knee, sig}};
      auto f = [&](double y) { return std::min(std::pow(std::abs(y), d.a), d.cap) * gauss(nu, t, x - y); };
      return s * require_converged(integrate_line(f, std::span<const Feature>(feats), spec), "j0.holder_test");
    }
  }
  return 0.0;
}

}  // namespace

double j0(const InitialMeasure& m, double nu, double t, double x, bool use_abs, const QuadratureSpec& spec) {
  if (!(nu > 0.0)) throw std::domain_error("j0: nu must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("j0: t must be positive");
  if (!std::isfinite(x)) throw std::domain_error("j0: x must be finite");
  if (!classify(m).in_MH) throw ValidationError("measure", "not in M_H; J_0 is infinite");
  double total = 0.0;
  for (const auto& at : m.atoms) total += (use_abs ? std::abs(at.w) : at.w) * gauss(nu, t, x - at.x);
  if (m.density) total += density_j0(*m.density, nu, t, x, use_abs, spec);
  return total;
}

double power_law_j0_origin(double a, double nu, double t) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("power_law_j0_origin needs 0 < a < 1");
  if (!(nu > 0.0) || !(t > 0.0)) throw std::domain_error("power_law_j0_origin needs nu, t > 0");
  return std::tgamma(0.5 * (1.0 - a)) / (std::sqrt(M_PI) * std::pow(2.0 * nu * t, 0.5 * a));
}

double density_at(const InitialMeasure& m, double x) { return m.density ? (*m.density)(x) : 0.0; }

}  // namespace roughshe
