#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "roughshe/error.hpp"
#include "roughshe/gaussian_kernel.hpp"
#include "roughshe/moment_engine.hpp"

using namespace roughshe;
using doctest::Approx;

// mpmath, 30 digits
TEST_CASE("K and H frozen values") {
  const MomentKernel mk(1.0, 1.0);
  CHECK(kernel_H(mk, 1.0) == Approx(0.952360489182557093).epsilon(1e-13));
  CHECK(kernel_K(mk, 1.0, 0.0) == Approx(0.434530305923645493).epsilon(1e-13));
  const MomentKernel mk2(2.0, 0.7);
  CHECK(kernel_H(mk2, 0.3) == Approx(0.116759158633376199).epsilon(1e-13));
  CHECK(kernel_K(mk2, 0.3, 0.4) == Approx(0.118250890159006420).epsilon(1e-13));
  CHECK(kernel_H(mk, 0.0) == 0.0);
}

TEST_CASE("H is the space-time mass of K (boost quadrature)") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double nu : {0.5, 1.0, 3.0}) {
    for (double lam : {0.3, 1.0, 1.7}) {
      const MomentKernel mk(nu, lam);
      const double t = 0.8;
      auto mass = [&](double s) {
        if (!(s > 0.0)) return 0.0;
        const double sd = std::sqrt(nu * s);
        auto f = [&](double x) { return kernel_K(mk, s, x); };
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -20 * sd, 20 * sd, 10, 1e-14);
      };
      CHECK(ts.integrate(mass, 0.0, t) == Approx(kernel_H(mk, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("K = upsilon G^2") {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0.1, 3.0), ux(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const MomentKernel mk(u(g), u(g));
    const double t = u(g), x = ux(g);
    const double gg = gauss(mk.nu, t, x);
    CHECK(kernel_K(mk, t, x) == Approx(upsilon(mk, t) * gg * gg).epsilon(1e-13));
  }
}

TEST_CASE("Dirac second moment, closed form and generic path") {
  const MomentKernel mk(1.0, 1.0);
  const auto d = InitialMeasure::dirac();
  CHECK(exact_second_moment(d, mk, 0.0, 0.5, 0.0) == Approx(0.630892978888978977).epsilon(1e-13));
  CHECK(exact_second_moment(d, mk, 0.0, 0.5, 0.5) == Approx(0.382655934693600930).epsilon(1e-13));
  MomentOptions gen;
  gen.force_generic = true;
  CHECK(exact_second_moment(d, mk, 0.0, 0.5, 0.0, gen) == Approx(0.630892978888978977).epsilon(1e-9));
  CHECK(exact_second_moment(d, mk, 0.0, 0.5, 0.5, gen) == Approx(0.382655934693600930).epsilon(1e-9));

  // I-moment is the moment minus J0^2
  for (double x : {0.0, 0.3, -1.2}) {
    const double j = gauss(1.0, 0.5, x);
    CHECK(delta_I_second_moment(mk, 0.5, x) == Approx(exact_second_moment(d, mk, 0.0, 0.5, x) - j * j).epsilon(1e-13));
  }
  CHECK(delta_I_second_moment(mk, 0.5, 0.0) == Approx(0.312583092705).epsilon(1e-11));

  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(0.2, 2.0), ux(-1.5, 1.5);
  for (int i = 0; i < 6; ++i) {
    const MomentKernel k(u(g), u(g));
    const auto m = InitialMeasure::dirac(ux(g), u(g));
    const double t = u(g), x = ux(g);
    CHECK(exact_second_moment(m, k, 0.0, t, x, gen) == Approx(exact_second_moment(m, k, 0.0, t, x)).epsilon(1e-8));
  }
}

TEST_CASE("Lebesgue second moment") {
  const MomentKernel mk(1.0, 1.0);
  const auto leb = InitialMeasure::lebesgue();
  CHECK(exact_second_moment(leb, mk, 0.0, 1.0, 0.0) == Approx(1.952360489182557093).epsilon(1e-13));
  CHECK(exact_second_moment(leb, mk, 0.5, 1.0, 0.7) == Approx(1.0 + 1.25 * 0.952360489182557093).epsilon(1e-13));
  MomentOptions gen;
  gen.force_generic = true;
  CHECK(j0sq_star_K(leb, mk, 1.0, 0.0, gen) == Approx(kernel_H(mk, 1.0)).epsilon(1e-6));
}

TEST_CASE("p-moment upper bound") {
  const auto leb = InitialMeasure::lebesgue();
  const auto d = InitialMeasure::dirac();
  const MomentKernel mk(1.0, 1.0);
  // p = 2 with quasi-linear rho is exact
  CHECK(pmoment_upper_bound(leb, RhoSpec::pam(1.0), 1.0, 2, 0.5, 0.0) ==
        Approx(exact_second_moment(leb, mk, 0.0, 0.5, 0.0)).epsilon(1e-13));
  CHECK(pmoment_upper_bound(d, RhoSpec::quasi_linear(1.0, 0.3), 1.0, 2, 0.5, 0.2) ==
        Approx(exact_second_moment(d, mk, 0.3, 0.5, 0.2)).epsilon(1e-13));
  // delta_0, p = 4: 2 K^(1,0) / lam^2 with lam^ = sqrt(2) 4
  const double lh = 4.0 * std::sqrt(2.0);
  CHECK(pmoment_upper_bound(d, RhoSpec::pam(1.0), 1.0, 4, 1.0, 0.0) ==
        Approx(2.0 * kernel_K(MomentKernel(1.0, lh), 1.0, 0.0) / (lh * lh)).epsilon(1e-12));
  // larger p, larger bound
  for (double t : {0.01, 0.1}) {
    double prev = 0.0;
    for (int p : {2, 4, 6, 8}) {
      const double b = pmoment_upper_bound(leb, RhoSpec::lipschitz_bound(1.0, 0.2), 1.0, p, t, 0.0);
      CHECK(b > prev);
      prev = b;
    }
  }
  // past double range the bound is reported as a numerical failure
  CHECK_THROWS_AS(pmoment_upper_bound(leb, RhoSpec::lipschitz_bound(1.0, 0.2), 1.0, 8, 1.0, 0.0), NumericalError);
  CHECK_THROWS_AS(pmoment_upper_bound(leb, RhoSpec::pam(), 1.0, 3, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(pmoment_upper_bound(leb, RhoSpec::pam(), 1.0, 2, 0.0, 0.0), std::domain_error);
}

TEST_CASE("bdg constants") {
  CHECK(bdg_constants(2, 0.0).z_p_bound == 1.0);
  CHECK(bdg_constants(2, 0.5).a_p_vip == 1.0);
  CHECK(bdg_constants(4, 0.0).z_p_bound == Approx(4.0));
  CHECK(bdg_constants(4, 0.0).a_p_vip == Approx(std::sqrt(2.0)));
  CHECK(bdg_constants(4, 1.0).a_p_vip == Approx(std::pow(2.0, 0.75)));
  CHECK_THROWS(bdg_constants(1, 0.0));
}

TEST_CASE("rho specs") {
  CHECK(RhoSpec::pam(2.0)(3.0) == 6.0);
  CHECK(RhoSpec::pam().vanishes_at_zero());
  CHECK_FALSE(RhoSpec::additive(0.5).vanishes_at_zero());
  CHECK(RhoSpec::quasi_linear(1.0, 0.6)(0.8) == Approx(1.0));
  CHECK(RhoSpec::zero()(5.0) == 0.0);
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const auto lb = RhoSpec::lipschitz_bound(1.3, 0.4);
  for (int i = 0; i < 200; ++i) {
    const double v = u(g);
    CHECK(lb(v) * lb(v) <= 1.3 * 1.3 * (0.16 + v * v) * (1 + 1e-14));
  }
  CHECK_THROWS_AS(RhoSpec::lipschitz_bound(0.0, 0.1).validate(), ValidationError);
  CHECK_THROWS_AS(RhoSpec::quasi_linear(1.0, -0.1).validate(), ValidationError);
}

TEST_CASE("power-law scaling") {
  const MomentKernel mk(1.0, 1.0);
  // mpmath double quadrature of (J0^2 * K)(t,0), a = 1/4
  const auto r = power_law_scaling(0.25, mk, {1e-3, 1e-2, 1e-1});
  CHECK(r.values[0] == Approx(0.402736125720012608).epsilon(1e-9));
  CHECK(r.values[1] == Approx(0.545696989028587159).epsilon(1e-9));
  CHECK(r.values[2] == Approx(0.767159375079703708).epsilon(1e-9));
  CHECK(r.exponent_fit == Approx(0.13993250441386).epsilon(1e-7));

  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(1e-3 * std::pow(10.0, 0.2 * i));
  const auto lo = power_law_scaling(0.01, mk, ts);
  const auto hi = power_law_scaling(0.49, mk, ts);
  CHECK(lo.exponent_fit > hi.exponent_fit);
  const auto blow = power_law_scaling(0.75, mk, ts);
  for (std::size_t i = 1; i < blow.values.size(); ++i) CHECK(blow.values[i] < blow.values[i - 1]);

  CHECK_THROWS_AS(power_law_scaling(0.25, mk, {0.01, 0.1}), ValidationError);
  CHECK_THROWS_AS(power_law_scaling(1.0, mk, ts), std::domain_error);
}
