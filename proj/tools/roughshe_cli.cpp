// Command-line front end: verify | moments | simulate | holder | weaklimit.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "roughshe/error.hpp"
#include "roughshe/io.hpp"
#include "roughshe/lemma_suite.hpp"
#include "roughshe/moment_engine.hpp"
#include "roughshe/regularity.hpp"
#include "roughshe/simulator.hpp"

using namespace roughshe;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kAcceptance = 3 };

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string format = "both";
  int threads = 0;
  std::string inject_fault;
  int trials = 1000;
};

bool want_csv(const Flags& f) { return f.format != "json"; }
bool want_json(const Flags& f) { return f.format != "csv"; }

std::string out_path(const Flags& f, const std::string& name) { return (std::filesystem::path(f.out) / name).string(); }

void write_json(const Flags& f, const std::string& name, const json& j) { write_atomic(out_path(f, name), j.dump(2) + "\n"); }

ExperimentConfig load(const Flags& f, const char* cmd) {
  if (f.config.empty()) throw ValidationError("--config", "required for this command");
  auto c = load_config(f.config);
  if (!c.command.empty() && c.command != cmd)
    throw ValidationError("config.command", "config is for '" + c.command + "', not '" + cmd + "'");
  c.command = cmd;
  if (f.seed) c.seed = *f.seed;
  return c;
}

const InitialMeasure& need_measure(const ExperimentConfig& c) {
  if (!c.measure) throw ValidationError("config.measure", "missing");
  return *c.measure;
}

void write_meta(const Flags& f, const ExperimentConfig& c) { write_json(f, c.command + "_config.json", to_json(c)); }

int cmd_verify(const Flags& f) {
  VerifyOptions opt;
  if (f.seed) opt.seed = *f.seed;
  opt.trials = f.trials;
  opt.inject_fault = f.inject_fault;
  const auto rep = run_verify(opt);
  write_json(f, "verify_report.json", to_json(rep));
  for (const auto& l : rep.lemmas)
    std::printf("%-32s %-10s trials=%-6d max_violation=%-12.3e tol=%.1e %s\n", l.id.c_str(), l.kind.c_str(), l.trials,
                l.max_violation, l.tolerance, l.pass ? "PASS" : "FAIL");
  if (!rep.all_pass()) {
    for (const auto& l : rep.lemmas)
      if (!l.pass) std::fprintf(stderr, "verify: %s failed%s%s\n", l.id.c_str(), l.note.empty() ? "" : ": ", l.note.c_str());
    return kAcceptance;
  }
  return kOk;
}

int cmd_moments(const Flags& f) {
  const auto c = load(f, "moments");
  const auto& m = need_measure(c);
  const auto rho = c.rho.build();
  const MomentKernel mk(c.nu, rho.lip_rho());
  const auto& q = c.moments.quantities;
  json rows = json::array();
  std::string csv = "t,x";
  for (const auto& name : q) csv += "," + name;
  csv += "\n";
  for (double t : c.moments.ts)
    for (double x : c.moments.xs) {
      json r{{"t", t}, {"x", x}};
      csv += fmt17(t) + "," + fmt17(x);
      for (const auto& name : q) {
        double v;
        if (name == "exact_second_moment") {
          if (rho.mode != RhoMode::quasi_linear)
            throw ValidationError("config.rho.mode", "exact_second_moment needs the quasi_linear family");
          v = exact_second_moment(m, mk, rho.varrho, t, x);
        } else if (name == "pmoment_upper_bound") {
          v = pmoment_upper_bound(m, rho, c.nu, c.moments.p, t, x);
        } else if (name == "delta_I_second_moment") {
          v = delta_I_second_moment(mk, t, x);
        } else {
          v = j0(m, c.nu, t, x);
        }
        r[name] = v;
        csv += "," + fmt17(v);
      }
      csv += "\n";
      rows.push_back(r);
    }
  if (want_csv(f)) write_atomic(out_path(f, "moments.csv"), csv);
  if (want_json(f)) write_json(f, "moments.json", json{{"rows", rows}});
  write_meta(f, c);
  return kOk;
}

SimOptions sim_options(const ExperimentConfig& c, const Flags& f) {
  SimOptions o;
  o.warm_start = c.warm_start;
  o.threads = f.threads;
  o.window = c.window;
  o.window_half_width = c.window_half_width;
  return o;
}

int cmd_simulate(const Flags& f) {
  const auto c = load(f, "simulate");
  const auto e = simulate(need_measure(c), c.rho.build(), c.nu, c.grid, NoiseSeed{c.seed}, c.replicas, sim_options(c, f));
  if (want_csv(f)) write_atomic(out_path(f, "ensemble.csv"), ensemble_csv(e));
  if (want_json(f)) {
    // per-slice ensemble mean of u^2, the quantity compared against exact moments
    json slices = json::array();
    for (std::size_t i = 0; i < e.nt_rec(); ++i)
      for (std::size_t j = 0; j < e.nx_rec(); ++j) {
        double s = 0.0;
        for (int r = 0; r < e.replicas; ++r) s += e.u(r, i, j) * e.u(r, i, j);
        slices.push_back(json{{"t", e.time(i)}, {"x", e.space(j)}, {"mean_u2", s / e.replicas}});
      }
    write_json(f, "ensemble_summary.json",
               json{{"replicas", e.replicas},
                    {"seed", e.seed.master_seed},
                    {"grid", to_json(e.grid)},
                    {"replaced_singular_nodes", e.replaced_singular_nodes},
                    {"second_moments", slices}});
  }
  write_meta(f, c);
  return kOk;
}

int cmd_holder(const Flags& f) {
  const auto c = load(f, "holder");
  const auto& H = c.holder;
  json estimates = json::array();
  auto emit = [&](const std::string& tag, const IncrementTable& table, const HolderEstimate& est) {
    if (want_csv(f)) write_atomic(out_path(f, "holder_" + tag + ".csv"), to_csv(table));
    estimates.push_back(json{{"name", tag}, {"estimate", to_json(est)}, {"table", to_json(table)}});
  };

  if (H.power_law) {
    // quadrature-only pipeline for |x|^{-a} data
    const auto rho = c.rho.build();
    const auto pl = power_law_scaling(H.power_law->a, MomentKernel(c.nu, rho.lip_rho()), H.power_law->ts);
    std::string csv = "t,norm_I\n";
    for (std::size_t i = 0; i < pl.values.size(); ++i) csv += fmt17(H.power_law->ts[i]) + "," + fmt17(pl.values[i]) + "\n";
    if (want_csv(f)) write_atomic(out_path(f, "holder_power_law.csv"), csv);
    if (want_json(f))
      write_json(f, "holder.json",
                 json{{"power_law", json{{"a", H.power_law->a},
                                         {"slope", pl.exponent_fit},
                                         {"predicted", (1.0 - 2.0 * H.power_law->a) / 4.0},
                                         {"ts", H.power_law->ts},
                                         {"norms", pl.values}}}});
    write_meta(f, c);
    return kOk;
  }

  FieldEnsemble e;
  Window w = H.window;
  if (H.synthetic) {
    const auto& S = *H.synthetic;
    const auto kind = S.kind == "linear" ? SyntheticKind::linear
                      : S.kind == "brownian" ? SyntheticKind::brownian
                                             : SyntheticKind::fbm;
    e = synthetic_ensemble(kind, S.beta, S.replicas, S.n_steps, S.step, S.n_nodes, c.seed);
  } else {
    e = simulate(need_measure(c), c.rho.build(), c.nu, c.grid, NoiseSeed{c.seed}, c.replicas, sim_options(c, f));
  }
  IncrementOptions io;
  io.field = H.field == "u" ? FieldView::u : FieldView::I;
  io.anchors = H.anchors == "left_edge" ? AnchorMode::left_edge : AnchorMode::dense;
  if (H.near_zero) {
    io.field = FieldView::u;
    io.anchors = AnchorMode::left_edge;
  }
  for (const auto& d : H.directions) {
    const Direction dir = d == "time" ? Direction::time : Direction::space;
    auto lags = dir == Direction::time ? H.lags_time : H.lags_space;
    if (lags.empty()) lags = dyadic_lags(e, dir, w);
    const auto table = moment_increments(e, H.p, dir, w, lags, io);
    emit(d, table, fit_exponent(table));
  }
  if (want_json(f)) write_json(f, "holder.json", json{{"estimates", estimates}});
  write_meta(f, c);
  return kOk;
}

int cmd_weaklimit(const Flags& f) {
  const auto c = load(f, "weaklimit");
  const auto pts = weak_limit_error(need_measure(c), c.rho.build(), c.nu, c.grid, NoiseSeed{c.seed}, c.replicas,
                                    gaussian_bump(c.weaklimit.phi_sigma), c.weaklimit.times, f.threads);
  if (want_csv(f)) write_atomic(out_path(f, "weaklimit.csv"), to_csv(pts));
  if (want_json(f)) {
    json arr = json::array();
    for (const auto& p : pts)
      arr.push_back(json{{"t", p.t}, {"mean_square_error", p.mean_square_error}, {"std_error", p.std_error}});
    write_json(f, "weaklimit.json", json{{"points", arr}});
  }
  write_meta(f, c);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic heat equation laboratory: exact moments, simulation, regularity estimates"};
  app.require_subcommand(1);
  Flags f;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* o = sub->add_option("--config", f.config, "JSON experiment config");
    if (needs_config) o->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--format", f.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--threads", f.threads, "worker threads, 0 = auto (results do not depend on it)")
        ->check(CLI::NonNegativeNumber);
  };
  auto* verify = app.add_subcommand("verify", "randomized kernel identity and inequality suite");
  add_common(verify, false);
  verify->add_option("--inject-fault", f.inject_fault, "perturb one identity by 1e-6 (default heat_kernel_product)")
      ->expected(0, 1)
      ->default_str("heat_kernel_product");
  verify->add_option("--trials", f.trials, "trials per lemma")->check(CLI::PositiveNumber);
  auto* moments = app.add_subcommand("moments", "exact second moments and moment bounds over a (t, x) grid");
  add_common(moments, true);
  auto* sim = app.add_subcommand("simulate", "finite-difference Monte Carlo ensemble");
  add_common(sim, true);
  auto* holder = app.add_subcommand("holder", "moment-increment exponent estimates");
  add_common(holder, true);
  auto* weak = app.add_subcommand("weaklimit", "L2 distance to the initial condition as t -> 0");
  add_common(weak, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) f.seed = seed;
  if (verify->parsed() && verify->count("--inject-fault") && f.inject_fault.empty()) f.inject_fault = "heat_kernel_product";

  try {
    if (verify->parsed()) return cmd_verify(f);
    if (moments->parsed()) return cmd_moments(f);
    if (sim->parsed()) return cmd_simulate(f);
    if (holder->parsed()) return cmd_holder(f);
    if (weak->parsed()) return cmd_weaklimit(f);
  } catch (const ValidationError& e) {
    std::cerr << "validation error at " << e.field_path() << ": " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kValidation;
}
