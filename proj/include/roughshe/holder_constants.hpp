#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "roughshe/initial_data.hpp"
#include "roughshe/moment_engine.hpp"

namespace roughshe {

// E exp(c |Y|^a), Y ~ N(0, v)
double k_ac_variance(double a, double c, double v, const QuadratureSpec& spec = {});
// K_{a,c}(nu t) = (exp(c|.|^a) * G_nu(t,.))(0)
double k_ac(double a, double c, double nu, double t, const QuadratureSpec& spec = {});

// Constants for increments of g(x) = exp(c |x|^a), a > 1:
//   |g(x - sqrt(t) z) - g(x - sqrt(t') z)| <= a c exp(c1|x|^a + c2|z|^a) |t'-t|^{1/2}
//   |g(x - sqrt(t) z) - g(x' - sqrt(t) z)| <= c3 exp(c4|z|^a) |x'-x|
struct DeltaGConstants {
  double n, a, c;
  double c1, c2, c3, c4;
};
DeltaGConstants delta_g_constants(double n, double a, double c);

struct SupSearch {
  double value = 0.0;   // sup found, before inflation
  double arg_s = 0.0;
  double arg_y = 0.0;
  double s_lo = 0.0, s_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  int grid_points = 0;  // per axis
  int refine_factor = 0;
};

struct ConstantsProvenance {
  int grid_points = 201;
  int refine_factor = 10;
  double safety_margin = 0.01;
  std::vector<std::pair<std::string, SupSearch>> sups;
};

struct IncrementBoundConstants {
  double n = 2.0;
  int p = 2;
  double nu = 1.0;
  double lip = 1.0;
  double vip = 0.0;
  double z_p = 1.0;
  double a_p = 1.0;
  std::array<double, 6> C{};
  std::optional<std::array<double, 6>> C_star;
  double upsilon_star_n = 0.0;
  ConstantsProvenance provenance;

  // C_{n,p} in ||I(t,x) - I(t',x')||_p <= C_{n,p}(|t-t'|^{1/4} + |x-x'|^{1/2})
  double c_np(bool star = false) const;
};

struct ConstantsOptions {
  int grid_points = 201;
  int refine_factor = 10;
  double safety_margin = 0.01;
  QuadratureSpec quad{1e-13, 1e-10, 2000, 12.0};
};

// Evaluates C_{n,1..6} (and the starred family when star is set) by grid
// search of the suprema over the relevant compacts, each inflated by the
// safety margin.
IncrementBoundConstants compute_constants(const InitialMeasure& m, const RhoSpec& rho, double nu, int p, double n,
                                          bool star, const ConstantsOptions& opt = {});

// Upper bound for ||I(t,x) - I(t',x')||_p. Uses the starred constants when
// star is set (window [0,n] x [-n,n]); otherwise [1/n,n] x [-n,n].
double increment_bound(const IncrementBoundConstants& k, int p, double t, double x, double t_prime, double x_prime,
                       bool star = false);

}  // namespace roughshe
