#include <doctest.h>

#include <cmath>
#include <random>

#include "roughshe/error.hpp"
#include "roughshe/gaussian_kernel.hpp"
#include "roughshe/holder_constants.hpp"

using namespace roughshe;
using doctest::Approx;

TEST_CASE("k_ac") {
  // a = 1: 2 e^{c^2 v/2} Phi(c sqrt v)
  CHECK(k_ac_variance(1.0, 0.7, 0.4) == Approx(1.48021015012491348).epsilon(1e-10));
  // mpmath
  CHECK(k_ac_variance(1.5, 0.7, 0.4) == Approx(1.44666654436044978).epsilon(1e-10));
  CHECK(k_ac_variance(1.5, 0.7, 0.0) == 1.0);
  CHECK(k_ac_variance(0.0, 0.7, 3.0) == Approx(std::exp(0.7)));
  CHECK(k_ac(1.5, 0.7, 2.0, 0.2) == k_ac_variance(1.5, 0.7, 0.4));
  CHECK_THROWS_AS(k_ac_variance(2.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(k_ac_variance(1.0, -1.0, 1.0), std::domain_error);
}

TEST_CASE("delta_g constants bound the increments") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double a = 1.001 + 0.999 * u01(g), c = 0.1 + 1.9 * u01(g), n = 0.5 + 2.5 * u01(g);
    const auto d = delta_g_constants(n, a, c);
    auto gf = [&](double v) { return std::exp(c * std::pow(std::abs(v), a)); };
    const double x = -3 + 6 * u01(g), xp = n * (2 * u01(g) - 1), xq = n * (2 * u01(g) - 1), z = -3 + 6 * u01(g);
    double t = n * u01(g), tp = n * u01(g);
    if (t > tp) std::swap(t, tp);
    const double lt = std::abs(gf(x - std::sqrt(t) * z) - gf(x - std::sqrt(tp) * z));
    CHECK(lt <= a * c * std::exp(d.c1 * std::pow(std::abs(x), a) + d.c2 * std::pow(std::abs(z), a)) *
                    std::sqrt(tp - t) * (1 + 1e-10));
    const double lx = std::abs(gf(xp - std::sqrt(t) * z) - gf(xq - std::sqrt(t) * z));
    CHECK(lx <= d.c3 * std::exp(d.c4 * std::pow(std::abs(z), a)) * std::abs(xp - xq) * (1 + 1e-10));
  }
  CHECK_THROWS(delta_g_constants(1.0, 1.0, 1.0));
}

TEST_CASE("Dirac constants: suprema sit at s = 1/n, y = 0") {
  const double n = 2.0, nu = 1.0;
  ConstantsOptions opt;
  opt.grid_points = 41;
  opt.refine_factor = 4;
  const auto k = compute_constants(InitialMeasure::dirac(), RhoSpec::pam(), nu, 2, n, false, opt);
  REQUIRE(k.provenance.sups.size() == 3);
  const auto& s3 = k.provenance.sups[1].second;
  CHECK(s3.value == Approx(n / (4.0 * M_PI * nu)).epsilon(1e-12));
  CHECK(s3.arg_s == Approx(1.0 / n));
  CHECK(s3.arg_y == Approx(0.0).scale(1.0));
  const auto& s5 = k.provenance.sups[2].second;
  CHECK(s5.value == Approx(n / (4.0 * M_PI * nu)).epsilon(1e-12));
  // C2 = r C1 etc.
  const double r = std::sqrt(M_PI * n) / std::sqrt(4.0 * nu);
  CHECK(k.C[1] == Approx(r * k.C[0]));
  CHECK(k.C[3] == Approx(r * k.C[2]));
  CHECK(k.C[5] == Approx(r * k.C[4]));
  CHECK(std::isfinite(k.c_np()));
  CHECK(k.c_np() > 0.0);
  CHECK_FALSE(k.C_star.has_value());
}

TEST_CASE("increment bound shape and window") {
  ConstantsOptions opt;
  opt.grid_points = 21;
  opt.refine_factor = 2;
  const auto k = compute_constants(InitialMeasure::lebesgue(), RhoSpec::pam(), 1.0, 2, 2.0, true, opt);
  REQUIRE(k.C_star.has_value());
  const double c = k.c_np(false);
  CHECK(increment_bound(k, 2, 1.0, 0.0, 1.0, 0.25, false) == Approx(c * 0.5));
  CHECK(increment_bound(k, 2, 1.0, 0.0, 1.0 + 1.0 / 16, 0.0, false) == Approx(c * 0.5));
  CHECK(increment_bound(k, 2, 0.0, 0.0, 0.5, 0.0, true) == Approx(k.c_np(true) * std::pow(0.5, 0.25)));
  // t = 0 is only inside the starred window
  CHECK_THROWS_AS(increment_bound(k, 2, 0.0, 0.0, 0.5, 0.0, false), std::domain_error);
  CHECK_THROWS_AS(increment_bound(k, 2, 1.0, 2.5, 1.0, 0.0, false), std::domain_error);
  CHECK_THROWS_AS(increment_bound(k, 4, 1.0, 0.0, 1.0, 0.0, false), std::domain_error);

  // more noise, larger constants
  const auto k2 = compute_constants(InitialMeasure::lebesgue(), RhoSpec::quasi_linear(1.0, 0.5), 1.0, 2, 2.0, false, opt);
  CHECK(k2.C[0] > k.C[0]);
  CHECK(k2.C[4] > k.C[4]);
  for (int i = 0; i < 6; ++i) CHECK(k2.C[i] >= k.C[i]);
  CHECK(k2.c_np() >= c);
}

TEST_CASE("constants validation") {
  CHECK_THROWS_AS(compute_constants(InitialMeasure::dirac(), RhoSpec::pam(), 1.0, 2, 2.0, true), ValidationError);
  CHECK_THROWS_AS(compute_constants(InitialMeasure::dirac(), RhoSpec::pam(), 1.0, 2, 1.0, false), ValidationError);
  CHECK_THROWS_AS(compute_constants(InitialMeasure::dirac(), RhoSpec::pam(), -1.0, 2, 2.0, false), ValidationError);
}
