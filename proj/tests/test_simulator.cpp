#include <doctest.h>

#include <cmath>
#include <vector>

#include "roughshe/error.hpp"
#include "roughshe/gaussian_kernel.hpp"
#include "roughshe/simulator.hpp"

using namespace roughshe;
using doctest::Approx;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.L = 4.0;
  g.nx = 80;
  g.t_max = 0.25;
  g.nt = 100;  // nu dt/dx^2 = 0.25
  return g;
}

}  // namespace

TEST_CASE("grid geometry and validation") {
  const auto g = small_grid();
  CHECK(g.dx() == Approx(0.1));
  CHECK(g.x(0) == -4.0);
  CHECK(g.x(80) == Approx(4.0));
  CHECK(g.nearest_node(0.05) == 40);  // midpoint goes left
  CHECK(g.nearest_node(0.0500001) == 41);
  CHECK(g.nearest_node(-99.0) == 0);
  CHECK_NOTHROW(g.validate(1.0));
  try {
    g.validate(2.1);
    FAIL("no throw");
  } catch (const ValidationError& e) {
    CHECK(e.field_path() == "grid.nt");
  }
  try {
    g.validate(1.0, 1.5);
    FAIL("no throw");
  } catch (const ValidationError& e) {
    CHECK(e.field_path() == "grid.L");
  }
  const auto f = GridSpec::from_spacing(6.0, 0.05, 0.5, 0.25);
  CHECK(f.nx == 240);
  CHECK(f.nt == 800);
  CHECK(f.dt() == Approx(0.25 * 0.05 * 0.05));
}

TEST_CASE("initial slice") {
  const auto g = small_grid();
  const auto d = initial_slice(InitialMeasure::dirac(0.05, 2.0), g);
  CHECK(d[40] == Approx(20.0));
  double mass = 0.0;
  for (double v : d) mass += v * g.dx();
  CHECK(mass == Approx(2.0));
  const auto h = initial_slice(InitialMeasure::with_density(DensitySpec::holder_test(0.5, 1.0)), g);
  CHECK(h[40] == Approx(0.0).scale(1.0));
  CHECK(h[0] == 1.0);
}

TEST_CASE("zero noise reproduces the explicit heat scheme") {
  const auto g = small_grid();
  const auto m = InitialMeasure::with_density(DensitySpec::tabulated({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}));
  SimOptions opt;
  opt.threads = 1;
  const auto e = simulate(m, RhoSpec::zero(), 1.0, g, {3}, 2, opt);
  // the same scheme by hand
  std::vector<double> u = initial_slice(m, g), un(u.size());
  const double r = g.dt() / (2.0 * g.dx() * g.dx());
  for (int k = 0; k < g.nt; ++k) {
    for (int j = 1; j < g.nx; ++j) un[j] = u[j] + r * (u[j + 1] - 2 * u[j] + u[j - 1]);
    un[0] = j0(m, 1.0, g.t(k + 1), -g.L);
    un[g.nx] = j0(m, 1.0, g.t(k + 1), g.L);
    std::swap(u, un);
  }
  const std::size_t last = e.nt_rec() - 1;
  for (int j = 0; j <= g.nx; ++j) {
    CHECK(e.u(0, last, j) == u[j]);
    CHECK(e.u(1, last, j) == u[j]);
    // second order in dx against the exact heat flow
    CHECK(e.u(0, last, j) == Approx(j0(m, 1.0, g.t_max, g.x(j))).scale(1.0).epsilon(2e-3));
  }
}

TEST_CASE("deterministic across thread counts and runs") {
  const auto g = small_grid();
  SimOptions a, b;
  a.threads = 1;
  b.threads = 3;
  const auto m = InitialMeasure::lebesgue();
  const auto e1 = simulate(m, RhoSpec::pam(), 1.0, g, {42}, 7, a);
  const auto e3 = simulate(m, RhoSpec::pam(), 1.0, g, {42}, 7, b);
  CHECK(e1.values == e3.values);
  const auto again = simulate(m, RhoSpec::pam(), 1.0, g, {42}, 7, b);
  CHECK(again.values == e3.values);
  const auto other = simulate(m, RhoSpec::pam(), 1.0, g, {43}, 7, a);
  CHECK(other.values != e1.values);
  // a replica depends only on its own address
  const auto e2 = simulate(m, RhoSpec::pam(), 1.0, g, {42}, 3, a);
  CHECK(sample_path(e2, 2) == sample_path(e1, 2));
}

TEST_CASE("PAM from Lebesgue keeps mean one") {
  const auto g = small_grid();
  SimOptions opt;
  opt.window.t_indices = {g.nt};
  const int R = 2000;
  const auto e = simulate(InitialMeasure::lebesgue(), RhoSpec::pam(), 1.0, g, {7}, R, opt);
  for (int j : {20, 40, 60}) {
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < R; ++r) {
      const double v = e.u(r, 0, j);
      s += v;
      s2 += v * v;
    }
    const double mean = s / R;
    const double se = std::sqrt((s2 / R - mean * mean) / (R - 1));
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
    // E u^2 = 1 + H(t) up to discretisation
    CHECK(s2 / R == Approx(1.0 + kernel_H(MomentKernel(1.0, 1.0), g.t_max)).epsilon(0.05));
  }
}

TEST_CASE("observation window, warm start, singular nodes") {
  const auto g = small_grid();
  SimOptions opt;
  opt.window.t_begin = 10;
  opt.window.t_stride = 30;
  opt.window.x_begin = 30;
  opt.window.x_end = 50;
  opt.window.x_stride = 10;
  const auto e = simulate(InitialMeasure::lebesgue(), RhoSpec::pam(), 1.0, g, {1}, 2, opt);
  CHECK(e.t_index == std::vector<int>{10, 40, 70, 100});
  CHECK(e.x_index == std::vector<int>{30, 40, 50});
  CHECK(e.values.size() == 2 * 4 * 3);
  CHECK(e.space(1) == Approx(0.0).scale(1.0));
  CHECK(e.I(0, 0, 0) == Approx(e.u(0, 0, 0) - 1.0));

  SimOptions w;
  w.warm_start = true;
  w.window.t_indices = {1};
  const auto m = InitialMeasure::dirac();
  const auto ew = simulate(m, RhoSpec::pam(), 1.0, g, {1}, 1, w);
  for (std::size_t j = 0; j < ew.nx_rec(); ++j) CHECK(ew.u(0, 0, j) == j0(m, 1.0, g.dt(), ew.space(j)));

  const auto ep = simulate(InitialMeasure::with_density(DensitySpec::power_law(0.25)), RhoSpec::pam(), 1.0, g, {1}, 1);
  CHECK(ep.replaced_singular_nodes);

  opt.window.x_end = 500;
  CHECK_THROWS_AS(simulate(InitialMeasure::lebesgue(), RhoSpec::pam(), 1.0, g, {1}, 1, opt), ValidationError);
  CHECK_THROWS_AS(simulate(InitialMeasure::lebesgue(), RhoSpec::pam(), 1.0, g, {1}, 0), ValidationError);
  CHECK_THROWS_AS(sample_path(e, 5), std::out_of_range);
}

TEST_CASE("overflow is a numerical error") {
  const auto g = small_grid();
  CHECK_THROWS_AS(simulate(InitialMeasure::lebesgue(), RhoSpec::pam(1e200), 1.0, g, {1}, 1), NumericalError);
}
