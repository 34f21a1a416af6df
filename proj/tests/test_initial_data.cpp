#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "roughshe/error.hpp"
#include "roughshe/gaussian_kernel.hpp"
#include "roughshe/initial_data.hpp"

using namespace roughshe;
using doctest::Approx;

TEST_CASE("classify") {
  CHECK(classify(InitialMeasure::dirac()).in_MH);
  CHECK_FALSE(classify(InitialMeasure::dirac()).in_MH_star);
  const auto leb = classify(InitialMeasure::lebesgue());
  CHECK(leb.in_MH);
  CHECK(leb.in_MH_star);
  CHECK(leb.bounded_density);
  CHECK(*leb.holder_alpha == 1.0);

  const auto h = classify(InitialMeasure::with_density(DensitySpec::holder_test(0.2, 2.0)));
  CHECK(h.in_MH_star);
  CHECK(*h.holder_alpha == 0.2);

  CHECK(classify(InitialMeasure::with_density(DensitySpec::power_law(0.5))).in_MH);
  CHECK_FALSE(classify(InitialMeasure::with_density(DensitySpec::power_law(0.5))).in_MH_star);
  CHECK_FALSE(classify(InitialMeasure::with_density(DensitySpec::power_law(1.0))).in_MH);

  const auto e = classify(InitialMeasure::with_density(DensitySpec::exponential_growth(1.0, 0.5, 1.5)));
  CHECK(e.in_MH);
  CHECK(e.in_MH_star);
  CHECK_FALSE(e.bounded_density);

  // mixed: an atom spoils the star class
  auto mix = InitialMeasure::lebesgue();
  mix.atoms.push_back({0.0, 1.0});
  CHECK(classify(mix).in_MH);
  CHECK_FALSE(classify(mix).in_MH_star);
}

TEST_CASE("validation paths") {
  auto bad = [](DensitySpec d, const char* path) {
    try {
      InitialMeasure::with_density(d).validate();
      FAIL("no throw");
    } catch (const ValidationError& ex) {
      CHECK(ex.field_path() == path);
    }
  };
  bad(DensitySpec::exponential_growth(1.0, 1.0, 2.0), "measure.density.a");
  bad(DensitySpec::power_law(1.5), "measure.density.a");
  bad(DensitySpec::holder_test(0.5, -1.0), "measure.density.cap");
  bad(DensitySpec::tabulated({0.0, 0.0}, {1.0, 1.0}), "measure.density.table");
  InitialMeasure empty;
  CHECK_THROWS_AS(empty.validate(), ValidationError);
  CHECK_THROWS_AS(InitialMeasure::dirac(0.0, 0.0).validate(), ValidationError);
  CHECK_THROWS_AS(density_kind_from_string("gaussian"), ValidationError);
  CHECK_THROWS_AS(j0(InitialMeasure::with_density(DensitySpec::power_law(1.0)), 1.0, 0.1, 0.0), ValidationError);
  CHECK_THROWS_AS(j0(InitialMeasure::dirac(), 1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("star growth covers the density") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> ua(1.0, 1.95), uc(0.1, 3.0), ux(-20.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    const auto d = DensitySpec::exponential_growth(uc(g), uc(g), ua(g));
    const auto sg = star_growth(InitialMeasure::with_density(d));
    CHECK(sg.b > d.a);
    CHECK(sg.b < 2.0);
    for (int k = 0; k < 20; ++k) {
      const double x = ux(g);
      CHECK(std::log(d(x)) <= std::log(sg.c) + std::pow(std::abs(x), sg.b) + 1e-12);
    }
  }
  CHECK_THROWS_AS(star_growth(InitialMeasure::dirac()), ValidationError);
}

// mpmath, nu = 1, t = 0.3, x = 0.4
TEST_CASE("j0 against frozen oracle values") {
  const double t = 0.3, x = 0.4;
  CHECK(j0(InitialMeasure::with_density(DensitySpec::holder_test(0.5, 2.0)), 1.0, t, x) ==
        Approx(0.684522196779046033).epsilon(1e-9));
  CHECK(j0(InitialMeasure::with_density(DensitySpec::exponential_growth(1.5, 0.7, 1.5)), 1.0, t, x) ==
        Approx(2.26832212986178121).epsilon(1e-9));
  CHECK(j0(InitialMeasure::with_density(DensitySpec::tabulated({-1.0, 0.0, 2.0}, {0.0, 1.0, 0.5})), 1.0, t, x) ==
        Approx(0.807217445458186561).epsilon(1e-13));
  CHECK(j0(InitialMeasure::with_density(DensitySpec::power_law(0.4)), 1.0, t, x) ==
        Approx(1.68966707045883332).epsilon(1e-13));
  CHECK(j0(InitialMeasure::with_density(DensitySpec::power_law(0.4)), 1.0, 1e-3, 3.0) ==
        Approx(0.644414067337225422).epsilon(1e-13));
  CHECK(j0(InitialMeasure::dirac(0.1, 2.0), 1.0, t, x) == Approx(2.0 * gauss(1.0, t, 0.3)).epsilon(1e-15));
  CHECK(j0(InitialMeasure::lebesgue(3.0), 1.0, t, x) == 3.0);
}

TEST_CASE("power law origin value") {
  for (double a : {0.01, 0.25, 0.5, 0.75, 0.99}) {
    for (double t : {1e-4, 0.1, 2.0}) {
      const auto m = InitialMeasure::with_density(DensitySpec::power_law(a));
      CHECK(j0(m, 0.7, t, 0.0) == Approx(power_law_j0_origin(a, 0.7, t)).epsilon(1e-13));
    }
  }
}

TEST_CASE("j0 of general densities against boost gauss-kronrod") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> ut(0.01, 2.0), ux(-3.0, 3.0), ua(0.05, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double t = ut(g), x = ux(g), nu = ut(g), al = ua(g);
    const auto d = DensitySpec::holder_test(al, 1.5);
    const double sd = std::sqrt(nu * t);
    auto f = [&](double y) { return d(y) * gauss(nu, t, x - y); };
    std::vector<double> pts{x - 14 * sd, x - 3 * sd, x, x + 3 * sd, x + 14 * sd};
    double q = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
      q += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[k], pts[k + 1], 20, 1e-13);
    CHECK(j0(InitialMeasure::with_density(d), nu, t, x) == Approx(q).epsilon(1e-8));
  }
}

TEST_CASE("j0 linear in the measure, abs view dominates") {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    InitialMeasure m;
    m.atoms = {{u(g), u(g) + 2.5}, {u(g), u(g) - 2.5}};
    m.density = DensitySpec::tabulated({-1.0, 0.0, 1.0}, {u(g), u(g), u(g)});
    const double t = 0.05 + std::abs(u(g)), x = u(g);
    auto m2 = m;
    for (auto& at : m2.atoms) at.w *= 3.0;
    m2.density->scale = 3.0;
    CHECK(j0(m2, 1.0, t, x) == Approx(3.0 * j0(m, 1.0, t, x)).epsilon(1e-12));
    CHECK(std::abs(j0(m, 1.0, t, x)) <= j0(m, 1.0, t, x, true) + 1e-14);
    CHECK(j0(m.abs_view(), 1.0, t, x) == Approx(j0(m, 1.0, t, x, true)).epsilon(1e-12));
  }
}

TEST_CASE("tabulated density from csv") {
  const char* path = "test_initial_data_table.csv";
  {
    std::ofstream out(path);
    out << "x,f\n-1,0\n0,1\n2,0.5\n";
  }
  const auto d = DensitySpec::from_csv(path);
  CHECK(d.xs.size() == 3);
  CHECK(d(1.0) == Approx(0.75));
  CHECK(d(2.5) == 0.0);
  std::remove(path);
  CHECK_THROWS_AS(DensitySpec::from_csv("does/not/exist.csv"), ValidationError);
}
