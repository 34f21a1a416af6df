#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "roughshe/error.hpp"
#include "roughshe/io.hpp"

using namespace roughshe;

namespace {

// random but valid configs
ExperimentConfig random_config(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  ExperimentConfig c;
  const char* cmds[] = {"moments", "simulate", "holder", "weaklimit"};
  c.command = cmds[pick(g)];
  c.nu = 0.1 + 3.0 * u(g);
  switch (pick(g)) {
    case 0: c.measure = InitialMeasure::dirac(u(g) - 0.5, 0.5 + u(g)); break;
    case 1: c.measure = InitialMeasure::lebesgue(0.5 + u(g)); break;
    case 2: c.measure = InitialMeasure::with_density(DensitySpec::holder_test(0.1 + 0.9 * u(g), 1.0 + u(g))); break;
    default: {
      InitialMeasure m = InitialMeasure::with_density(DensitySpec::tabulated({-1.0, 0.0, 1.5}, {u(g), u(g), u(g)}), "tab");
      m.atoms.push_back({u(g), 1.0 + u(g)});
      c.measure = m;
    }
  }
  const char* modes[] = {"quasi_linear", "lipschitz_bound", "additive", "zero"};
  c.rho.mode = modes[pick(g)];
  c.rho.lam = 0.5 + u(g);
  c.rho.varrho = u(g);
  c.rho.lip = 0.5 + u(g);
  c.rho.vip = u(g);
  c.grid.L = 3.0 + 5.0 * u(g);
  c.grid.nx = 10 + pick(g) * 37;
  c.grid.t_max = u(g) + 0.1;
  c.grid.nt = 100 + pick(g);
  c.seed = g();
  c.replicas = 1 + pick(g) * 100;
  c.warm_start = pick(g) % 2;
  if (pick(g) == 0) c.window.t_indices = {1, 5, 9};
  c.window.x_stride = 1 + pick(g);
  c.window_half_width = u(g);
  c.moments.ts = {u(g) + 0.01, 1.0 / 3.0};
  c.moments.xs = {0.0, -0.1};
  c.moments.quantities = {"j0", "exact_second_moment"};
  c.moments.p = 2 * (1 + pick(g));
  c.holder.window = {0.5, 1.0, -1.0, u(g)};
  c.holder.lags_time = {1, 2, 4, 8, 16};
  if (pick(g) < 2) c.holder.synthetic = SyntheticSection{"fbm", u(g), 10, 64, 1.0 / 64, 2};
  if (pick(g) < 2) c.holder.power_law = PowerLawSection{0.25, {1e-3, 1e-2, 1e-1}};
  c.holder.anchors = pick(g) % 2 ? "dense" : "left_edge";
  c.weaklimit.times = {0.2, 0.1, 0.05};
  c.weaklimit.phi_sigma = 0.1 + u(g);
  return c;
}

std::string error_path(const std::string& text) {
  try {
    parse_config(json::parse(text));
  } catch (const ValidationError& e) {
    return e.field_path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("config round trip") {
  std::mt19937_64 g(2024);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_config(g);
    const auto j = to_json(c);
    const auto back = parse_config(json::parse(j.dump()));
    CHECK(back == c);
    CHECK(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("grid given by spacing is canonicalised") {
  const auto c = parse_config(json::parse(R"({"grid": {"L": 6, "dx": 0.05, "dt_over_dx2": 0.25, "t_max": 0.5}})"));
  CHECK(c.grid.nx == 240);
  CHECK(c.grid.nt == 800);
  const auto j = to_json(c);
  CHECK(j["grid"].contains("nx"));
  CHECK_FALSE(j["grid"].contains("dx"));
}

TEST_CASE("errors carry the field path") {
  CHECK(error_path(R"({"grid": {"L": 6, "dx": -1, "t_max": 1}})") == "config.grid.dx");
  CHECK(error_path(R"({"grid": {"L": 6, "nx": 1.5, "nt": 3, "t_max": 1}})") == "config.grid.nx");
  CHECK(error_path(R"({"grid": {"nx": 10, "nt": 3, "t_max": 1}})") == "config.grid.L");
  CHECK(error_path(R"({"nu": -1})") == "config.nu");
  CHECK(error_path(R"({"bogus": 1})") == "config.bogus");
  CHECK(error_path(R"({"rho": {"mode": "cubic"}})") == "config.rho.mode");
  CHECK(error_path(R"({"rho": {"mode": "lipschitz_bound", "lip": 0}})") == "config.rho.lip");
  CHECK(error_path(R"({"measure": {"density": {"kind": "exponential_growth", "c": 1, "c2": 1, "a": 2.5}}})") ==
        "config.measure.density.a");
  CHECK(error_path(R"({"measure": {"atoms": [{"x": 0, "w": "one"}]}})") == "config.measure.atoms[0].w");
  CHECK(error_path(R"({"moments": {"ts": [0.1, -1], "xs": [0]}})") == "config.moments.ts");
  CHECK(error_path(R"({"moments": {"ts": [0.1], "xs": [0], "p": 3}})") == "config.moments.p");
  CHECK(error_path(R"({"holder": {"anchors": "middle"}})") == "config.holder.anchors");
  CHECK(error_path(R"({"weaklimit": {"phi_sigma": 0.5}})") == "config.weaklimit.times");
  CHECK(error_path(R"({"seed": -4})") == "config.seed");
  CHECK_THROWS_AS(load_config("no/such/config.json"), ValidationError);
}

TEST_CASE("atomic write and csv layout") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "roughshe_io_test" / "nested";
  fs::remove_all(dir.parent_path());
  const auto path = (dir / "out.txt").string();
  write_atomic(path, "hello\n");
  write_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  int entries = 0;
  for (const auto& p : fs::directory_iterator(dir)) {
    (void)p;
    ++entries;
  }
  CHECK(entries == 1);
  fs::remove_all(dir.parent_path());

  IncrementTable t;
  t.rows = {{0.1, 1, 0.5, 0.01, 10}};
  CHECK(to_csv(t) == "lag,moment,stderr\n0.10000000000000001,0.5,0.01\n");
  CHECK(to_csv(std::vector<WeakLimitPoint>{{0.2, 1.0, 0.0}}).rfind("t,mean_square_error,stderr\n", 0) == 0);
  CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("verify report json") {
  VerifyOptions o;
  o.trials = 3;
  const auto r = run_verify(o);
  const auto j = to_json(r);
  CHECK(j["seed"] == 20241016u);
  CHECK(j["lemmas"].size() == lemma_ids().size());
  CHECK(j["all_pass"] == true);
}
