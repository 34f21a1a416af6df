#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roughshe/quadrature.hpp"

namespace roughshe {

enum class DensityKind { constant, power_law, exponential_growth, holder_test, tabulated };

const char* to_string(DensityKind k);
DensityKind density_kind_from_string(const std::string& s);

// f(x) = scale * base(x), with base one of
//   constant            c
//   power_law           |x|^{-a}
//   exponential_growth  c1 exp(c2 |x|^a)
//   holder_test         min(|x|^alpha, M)
//   tabulated           linear interpolation of (xs, fs), zero outside
struct DensitySpec {
  DensityKind kind = DensityKind::constant;
  double scale = 1.0;
  double c = 1.0;      // constant value, or c1 for exponential growth
  double c2 = 0.0;     // exponential growth rate
  double a = 0.0;      // power-law / growth exponent, or the Holder alpha
  double cap = 0.0;    // M for holder_test
  std::vector<double> xs;
  std::vector<double> fs;

  static DensitySpec constant(double c);
  static DensitySpec power_law(double a);
  static DensitySpec exponential_growth(double c1, double c2, double a);
  static DensitySpec holder_test(double alpha, double cap);
  static DensitySpec tabulated(std::vector<double> xs, std::vector<double> fs);
  // two columns x, f(x); header line optional
  static DensitySpec from_csv(const std::string& path);

  double operator()(double x) const;
  void validate(const std::string& path = "density") const;
};

struct Atom {
  double x;
  double w;
};

struct InitialMeasure {
  std::vector<Atom> atoms;
  std::optional<DensitySpec> density;
  std::string label;

  static InitialMeasure dirac(double x0 = 0.0, double w = 1.0);
  static InitialMeasure lebesgue(double c = 1.0);
  static InitialMeasure with_density(DensitySpec d, std::string label = {});

  // |mu|: weights and density replaced by absolute values
  InitialMeasure abs_view() const;
  void validate(const std::string& path = "measure") const;
  bool is_single_atom() const { return atoms.size() == 1 && !density; }
  bool is_constant_density() const {
    return atoms.empty() && density && density->kind == DensityKind::constant;
  }
};

struct GrowthClass {
  bool in_MH = false;
  bool in_MH_star = false;
  bool bounded_density = false;
  std::optional<double> holder_alpha;
};

// Structural membership test. Throws ValidationError for densities that
// cannot belong to M_H (growth exponent >= 2).
GrowthClass classify(const InitialMeasure& m);

// |f(x)| <= c exp(|x|^b) for all x, with b in [1, 2). Only for in_MH_star.
struct StarGrowth {
  double b;
  double c;
};
StarGrowth star_growth(const InitialMeasure& m);

// J_0(t,x) = (mu * G_nu(t,.))(x), or with |mu| when use_abs.
double j0(const InitialMeasure& m, double nu, double t, double x, bool use_abs = false,
          const QuadratureSpec& spec = {});

// J_0(t, 0) for mu = |x|^{-a} dx
double power_law_j0_origin(double a, double nu, double t);

// Value of the initial datum as a function on the grid: density value plus
// nothing for atoms (atoms are handled by the caller).
double density_at(const InitialMeasure& m, double x);

}  // namespace roughshe
