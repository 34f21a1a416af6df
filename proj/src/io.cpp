#include "roughshe/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "roughshe/error.hpp"

namespace roughshe {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

// ---------------------------------------------------------------- config

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(path + "." + key, "missing");
  return j.at(key);
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ValidationError(path, "expected an integer");
  return j.get<long long>();
}

double opt_num(const json& j, const char* key, const std::string& path, double dflt) {
  return j.contains(key) ? num(j.at(key), path + "." + key) : dflt;
}
int opt_int(const json& j, const char* key, const std::string& path, int dflt) {
  return j.contains(key) ? static_cast<int>(integer(j.at(key), path + "." + key)) : dflt;
}
bool opt_bool(const json& j, const char* key, const std::string& path, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) throw ValidationError(path + "." + key, "expected a boolean");
  return j.at(key).get<bool>();
}
std::string opt_str(const json& j, const char* key, const std::string& path, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) throw ValidationError(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> num_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}
std::vector<int> int_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<int>(integer(j[i], path + "[" + std::to_string(i) + "]")));
  return out;
}
std::vector<std::string> str_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ValidationError(path + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ValidationError(path + "." + it.key(), "unknown field");
  }
}

bool same_density(const DensitySpec& a, const DensitySpec& b) {
  return a.kind == b.kind && a.scale == b.scale && a.c == b.c && a.c2 == b.c2 && a.a == b.a && a.cap == b.cap &&
         a.xs == b.xs && a.fs == b.fs;
}

bool same_measure(const InitialMeasure& a, const InitialMeasure& b) {
  if (a.atoms.size() != b.atoms.size() || a.label != b.label) return false;
  for (std::size_t i = 0; i < a.atoms.size(); ++i)
    if (a.atoms[i].x != b.atoms[i].x || a.atoms[i].w != b.atoms[i].w) return false;
  if (a.density.has_value() != b.density.has_value()) return false;
  return !a.density || same_density(*a.density, *b.density);
}

bool same_window(const Window& a, const Window& b) {
  return a.t_lo == b.t_lo && a.t_hi == b.t_hi && a.x_lo == b.x_lo && a.x_hi == b.x_hi;
}

bool same_obs(const ObservationWindow& a, const ObservationWindow& b) {
  return a.t_indices == b.t_indices && a.t_begin == b.t_begin && a.t_end == b.t_end && a.t_stride == b.t_stride &&
         a.x_begin == b.x_begin && a.x_end == b.x_end && a.x_stride == b.x_stride;
}

GridSpec parse_grid(const json& j, const std::string& path) {
  check_keys(j, path, {"L", "nx", "t_max", "nt", "dx", "dt_over_dx2"});
  const double L = num(field(j, "L", path), path + ".L");
  const double t_max = num(field(j, "t_max", path), path + ".t_max");
  if (j.contains("dx")) {
    const double dx = num(j.at("dx"), path + ".dx");
    const double ratio = opt_num(j, "dt_over_dx2", path, 0.25);
    if (!(dx > 0.0)) throw ValidationError(path + ".dx", "must be positive");
    if (!(ratio > 0.0)) throw ValidationError(path + ".dt_over_dx2", "must be positive");
    if (!(L > 0.0)) throw ValidationError(path + ".L", "must be positive");
    if (!(t_max > 0.0)) throw ValidationError(path + ".t_max", "must be positive");
    return GridSpec::from_spacing(L, dx, t_max, ratio);
  }
  GridSpec g;
  g.L = L;
  g.t_max = t_max;
  g.nx = static_cast<int>(integer(field(j, "nx", path), path + ".nx"));
  g.nt = static_cast<int>(integer(field(j, "nt", path), path + ".nt"));
  return g;
}

ObservationWindow parse_obs(const json& j, const std::string& path) {
  check_keys(j, path, {"t_indices", "t_begin", "t_end", "t_stride", "x_begin", "x_end", "x_stride"});
  ObservationWindow w;
  if (j.contains("t_indices")) w.t_indices = int_list(j.at("t_indices"), path + ".t_indices");
  w.t_begin = opt_int(j, "t_begin", path, 0);
  w.t_end = opt_int(j, "t_end", path, -1);
  w.t_stride = opt_int(j, "t_stride", path, 1);
  w.x_begin = opt_int(j, "x_begin", path, 0);
  w.x_end = opt_int(j, "x_end", path, -1);
  w.x_stride = opt_int(j, "x_stride", path, 1);
  return w;
}

json obs_to_json(const ObservationWindow& w) {
  json j;
  if (!w.t_indices.empty()) j["t_indices"] = w.t_indices;
  j["t_begin"] = w.t_begin;
  j["t_end"] = w.t_end;
  j["t_stride"] = w.t_stride;
  j["x_begin"] = w.x_begin;
  j["x_end"] = w.x_end;
  j["x_stride"] = w.x_stride;
  return j;
}

Window parse_window(const json& j, const std::string& path) {
  check_keys(j, path, {"t_lo", "t_hi", "x_lo", "x_hi"});
  return {num(field(j, "t_lo", path), path + ".t_lo"), num(field(j, "t_hi", path), path + ".t_hi"),
          num(field(j, "x_lo", path), path + ".x_lo"), num(field(j, "x_hi", path), path + ".x_hi")};
}

json window_to_json(const Window& w) { return json{{"t_lo", w.t_lo}, {"t_hi", w.t_hi}, {"x_lo", w.x_lo}, {"x_hi", w.x_hi}}; }

RhoConfig parse_rho(const json& j, const std::string& path) {
  check_keys(j, path, {"mode", "lam", "varrho", "lip", "vip"});
  RhoConfig r;
  r.mode = opt_str(j, "mode", path, "quasi_linear");
  r.lam = opt_num(j, "lam", path, 1.0);
  r.varrho = opt_num(j, "varrho", path, 0.0);
  r.lip = opt_num(j, "lip", path, 1.0);
  r.vip = opt_num(j, "vip", path, 0.0);
  if (r.mode != "quasi_linear" && r.mode != "lipschitz_bound" && r.mode != "additive" && r.mode != "zero")
    throw ValidationError(path + ".mode", "expected quasi_linear, lipschitz_bound, additive or zero");
  try {
    r.build().validate(path);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(path, e.what());
  }
  return r;
}

json rho_to_json(const RhoConfig& r) {
  return json{{"mode", r.mode}, {"lam", r.lam}, {"varrho", r.varrho}, {"lip", r.lip}, {"vip", r.vip}};
}

}  // namespace

RhoSpec RhoConfig::build() const {
  if (mode == "quasi_linear") return RhoSpec::quasi_linear(lam, varrho);
  if (mode == "lipschitz_bound") return RhoSpec::lipschitz_bound(lip, vip);
  if (mode == "additive") return RhoSpec::additive(vip);
  if (mode == "zero") return RhoSpec::zero();
  throw ValidationError("rho.mode", "unknown mode '" + mode + "'");
}

bool HolderSection::operator==(const HolderSection& o) const {
  return p == o.p && directions == o.directions && same_window(window, o.window) && lags_time == o.lags_time &&
         lags_space == o.lags_space && field == o.field && anchors == o.anchors && near_zero == o.near_zero &&
         synthetic == o.synthetic && power_law == o.power_law;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.measure.has_value() != b.measure.has_value()) return false;
  if (a.measure && !same_measure(*a.measure, *b.measure)) return false;
  return a.command == b.command && a.nu == b.nu && a.rho == b.rho && a.grid.L == b.grid.L && a.grid.nx == b.grid.nx &&
         a.grid.t_max == b.grid.t_max && a.grid.nt == b.grid.nt && a.seed == b.seed && a.replicas == b.replicas &&
         a.warm_start == b.warm_start && same_obs(a.window, b.window) && a.window_half_width == b.window_half_width &&
         a.moments == b.moments && a.holder == b.holder && a.weaklimit == b.weaklimit;
}

InitialMeasure parse_measure(const json& j, const std::string& path) {
  check_keys(j, path, {"atoms", "density", "label"});
  InitialMeasure m;
  m.label = opt_str(j, "label", path, "");
  if (j.contains("atoms")) {
    const auto& a = j.at("atoms");
    if (!a.is_array()) throw ValidationError(path + ".atoms", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto p = path + ".atoms[" + std::to_string(i) + "]";
      check_keys(a[i], p, {"x", "w"});
      m.atoms.push_back({num(field(a[i], "x", p), p + ".x"), num(field(a[i], "w", p), p + ".w")});
    }
  }
  if (j.contains("density")) {
    const auto& d = j.at("density");
    const auto p = path + ".density";
    check_keys(d, p, {"kind", "scale", "c", "c2", "a", "cap", "xs", "fs", "csv"});
    DensitySpec s;
    if (d.contains("csv")) {
      s = DensitySpec::from_csv(opt_str(d, "csv", p, ""));
    } else {
      try {
        s.kind = density_kind_from_string(opt_str(d, "kind", p, "constant"));
      } catch (const std::exception& e) {
        throw ValidationError(p + ".kind", e.what());
      }
      if (d.contains("xs")) s.xs = num_list(d.at("xs"), p + ".xs");
      if (d.contains("fs")) s.fs = num_list(d.at("fs"), p + ".fs");
    }
    s.scale = opt_num(d, "scale", p, 1.0);
    s.c = opt_num(d, "c", p, s.c);
    s.c2 = opt_num(d, "c2", p, s.c2);
    s.a = opt_num(d, "a", p, s.a);
    s.cap = opt_num(d, "cap", p, s.cap);
    m.density = s;
  }
  m.validate(path);
  classify(m);  // rejects growth outside M_H
  return m;
}

json to_json(const InitialMeasure& m) {
  json j;
  if (!m.atoms.empty()) {
    json a = json::array();
    for (const auto& at : m.atoms) a.push_back(json{{"x", at.x}, {"w", at.w}});
    j["atoms"] = a;
  }
  if (m.density) {
    const auto& d = *m.density;
    json dj{{"kind", to_string(d.kind)}, {"scale", d.scale}, {"c", d.c}, {"c2", d.c2}, {"a", d.a}, {"cap", d.cap}};
    if (d.kind == DensityKind::tabulated) {
      dj["xs"] = d.xs;
      dj["fs"] = d.fs;
    }
    j["density"] = dj;
  }
  if (!m.label.empty()) j["label"] = m.label;
  return j;
}

json to_json(const GridSpec& g) { return json{{"L", g.L}, {"nx", g.nx}, {"t_max", g.t_max}, {"nt", g.nt}}; }

ExperimentConfig parse_config(const json& j) {
  const std::string P = "config";
  check_keys(j, P,
             {"command", "nu", "measure", "rho", "grid", "seed", "replicas", "warm_start", "window",
              "window_half_width", "moments", "holder", "weaklimit"});
  ExperimentConfig c;
  c.command = opt_str(j, "command", P, "");
  c.nu = opt_num(j, "nu", P, 1.0);
  if (!(c.nu > 0.0) || !std::isfinite(c.nu)) throw ValidationError("config.nu", "must be positive and finite");
  if (j.contains("measure")) c.measure = parse_measure(j.at("measure"), "config.measure");
  if (j.contains("rho")) c.rho = parse_rho(j.at("rho"), "config.rho");
  if (j.contains("grid")) c.grid = parse_grid(j.at("grid"), "config.grid");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ValidationError("config.seed", "expected a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.replicas = opt_int(j, "replicas", P, 1);
  if (c.replicas < 1) throw ValidationError("config.replicas", "must be >= 1");
  c.warm_start = opt_bool(j, "warm_start", P, false);
  if (j.contains("window")) c.window = parse_obs(j.at("window"), "config.window");
  c.window_half_width = opt_num(j, "window_half_width", P, 0.0);

  if (j.contains("moments")) {
    const auto& m = j.at("moments");
    const std::string p = "config.moments";
    check_keys(m, p, {"quantities", "ts", "xs", "p"});
    if (m.contains("quantities")) c.moments.quantities = str_list(m.at("quantities"), p + ".quantities");
    for (const auto& q : c.moments.quantities)
      if (q != "exact_second_moment" && q != "pmoment_upper_bound" && q != "delta_I_second_moment" && q != "j0")
        throw ValidationError(p + ".quantities", "unknown quantity '" + q + "'");
    c.moments.ts = num_list(field(m, "ts", p), p + ".ts");
    c.moments.xs = num_list(field(m, "xs", p), p + ".xs");
    for (double t : c.moments.ts)
      if (!(t > 0.0)) throw ValidationError(p + ".ts", "times must be positive");
    c.moments.p = opt_int(m, "p", p, 2);
    if (c.moments.p < 2 || c.moments.p % 2) throw ValidationError(p + ".p", "must be an even integer >= 2");
  }
  if (j.contains("holder")) {
    const auto& h = j.at("holder");
    const std::string p = "config.holder";
    check_keys(h, p,
               {"p", "directions", "window", "lags_time", "lags_space", "field", "anchors", "near_zero", "synthetic",
                "power_law"});
    auto& H = c.holder;
    H.p = opt_int(h, "p", p, 2);
    if (H.p < 2 || H.p % 2) throw ValidationError(p + ".p", "must be an even integer >= 2");
    if (h.contains("directions")) H.directions = str_list(h.at("directions"), p + ".directions");
    for (const auto& d : H.directions)
      if (d != "time" && d != "space") throw ValidationError(p + ".directions", "expected time or space");
    if (h.contains("window")) H.window = parse_window(h.at("window"), p + ".window");
    if (h.contains("lags_time")) H.lags_time = int_list(h.at("lags_time"), p + ".lags_time");
    if (h.contains("lags_space")) H.lags_space = int_list(h.at("lags_space"), p + ".lags_space");
    H.field = opt_str(h, "field", p, "I");
    if (H.field != "I" && H.field != "u") throw ValidationError(p + ".field", "expected I or u");
    H.anchors = opt_str(h, "anchors", p, "dense");
    if (H.anchors != "dense" && H.anchors != "left_edge") throw ValidationError(p + ".anchors", "expected dense or left_edge");
    H.near_zero = opt_bool(h, "near_zero", p, false);
    if (h.contains("synthetic")) {
      const auto& s = h.at("synthetic");
      const std::string q = p + ".synthetic";
      check_keys(s, q, {"kind", "beta", "replicas", "n_steps", "step", "n_nodes"});
      SyntheticSection S;
      S.kind = opt_str(s, "kind", q, S.kind);
      if (S.kind != "linear" && S.kind != "brownian" && S.kind != "fbm")
        throw ValidationError(q + ".kind", "expected linear, brownian or fbm");
      S.beta = opt_num(s, "beta", q, S.beta);
      S.replicas = opt_int(s, "replicas", q, S.replicas);
      S.n_steps = opt_int(s, "n_steps", q, S.n_steps);
      S.step = opt_num(s, "step", q, S.step);
      S.n_nodes = opt_int(s, "n_nodes", q, S.n_nodes);
      H.synthetic = S;
    }
    if (h.contains("power_law")) {
      const auto& s = h.at("power_law");
      const std::string q = p + ".power_law";
      check_keys(s, q, {"a", "ts"});
      PowerLawSection S;
      S.a = opt_num(s, "a", q, S.a);
      S.ts = num_list(field(s, "ts", q), q + ".ts");
      H.power_law = S;
    }
  }
  if (j.contains("weaklimit")) {
    const auto& w = j.at("weaklimit");
    const std::string p = "config.weaklimit";
    check_keys(w, p, {"phi_sigma", "times"});
    c.weaklimit.phi_sigma = opt_num(w, "phi_sigma", p, 0.5);
    if (!(c.weaklimit.phi_sigma > 0.0)) throw ValidationError(p + ".phi_sigma", "must be positive");
    c.weaklimit.times = num_list(field(w, "times", p), p + ".times");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["nu"] = c.nu;
  if (c.measure) j["measure"] = to_json(*c.measure);
  j["rho"] = rho_to_json(c.rho);
  j["grid"] = to_json(c.grid);
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["warm_start"] = c.warm_start;
  j["window"] = obs_to_json(c.window);
  j["window_half_width"] = c.window_half_width;
  j["moments"] = json{{"quantities", c.moments.quantities}, {"ts", c.moments.ts}, {"xs", c.moments.xs}, {"p", c.moments.p}};
  const auto& H = c.holder;
  json h{{"p", H.p},           {"directions", H.directions}, {"window", window_to_json(H.window)},
         {"lags_time", H.lags_time}, {"lags_space", H.lags_space}, {"field", H.field},
         {"anchors", H.anchors}, {"near_zero", H.near_zero}};
  if (H.synthetic) {
    const auto& S = *H.synthetic;
    h["synthetic"] = json{{"kind", S.kind},       {"beta", S.beta}, {"replicas", S.replicas},
                          {"n_steps", S.n_steps}, {"step", S.step}, {"n_nodes", S.n_nodes}};
  }
  if (H.power_law) h["power_law"] = json{{"a", H.power_law->a}, {"ts", H.power_law->ts}};
  j["holder"] = h;
  j["weaklimit"] = json{{"phi_sigma", c.weaklimit.phi_sigma}, {"times", c.weaklimit.times}};
  return j;
}

// ---------------------------------------------------------------- results

json to_json(const VerifyReport& r) {
  json j;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["injected_fault"] = r.injected_fault.empty() ? json(nullptr) : json(r.injected_fault);
  j["all_pass"] = r.all_pass();
  json arr = json::array();
  for (const auto& l : r.lemmas) {
    json e{{"id", l.id},
           {"kind", l.kind},
           {"trials", l.trials},
           {"max_violation", std::isfinite(l.max_violation) ? json(l.max_violation) : json("inf")},
           {"tolerance", l.tolerance},
           {"pass", l.pass}};
    if (!l.note.empty()) e["note"] = l.note;
    arr.push_back(e);
  }
  j["lemmas"] = arr;
  return j;
}

json to_json(const HolderEstimate& e) {
  return json{{"exponent", e.exponent},
              {"std_error", e.std_error},
              {"p", e.p},
              {"direction", to_string(e.direction)},
              {"window", window_to_json(e.window)},
              {"lags", e.lags},
              {"r_squared", e.r_squared},
              {"excluded", e.excluded}};
}

json to_json(const IncrementTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back(json{{"lag", r.lag}, {"lag_steps", r.lag_steps}, {"moment", r.moment}, {"std_error", r.std_error},
                        {"anchors", r.anchors}});
  return json{{"p", t.p}, {"direction", to_string(t.direction)}, {"window", window_to_json(t.window)}, {"rows", rows}};
}

json to_json(const IncrementBoundConstants& k) {
  json j{{"n", k.n}, {"p", k.p}, {"nu", k.nu}, {"lip", k.lip}, {"vip", k.vip}, {"z_p", k.z_p}, {"a_p", k.a_p},
         {"C", k.C}, {"upsilon_star_n", k.upsilon_star_n}, {"c_np", k.c_np(false)}};
  if (k.C_star) {
    j["C_star"] = *k.C_star;
    j["c_np_star"] = k.c_np(true);
  }
  json sups = json::array();
  for (const auto& [name, s] : k.provenance.sups)
    sups.push_back(json{{"name", name},
                        {"value", s.value},
                        {"arg_s", s.arg_s},
                        {"arg_y", s.arg_y},
                        {"s_range", {s.s_lo, s.s_hi}},
                        {"y_range", {s.y_lo, s.y_hi}},
                        {"grid_points", s.grid_points},
                        {"refine_factor", s.refine_factor}});
  j["provenance"] = json{{"grid_points", k.provenance.grid_points},
                         {"refine_factor", k.provenance.refine_factor},
                         {"safety_margin", k.provenance.safety_margin},
                         {"sups", sups}};
  return j;
}

std::string to_csv(const IncrementTable& t) {
  std::string s = "lag,moment,stderr\n";
  for (const auto& r : t.rows) s += fmt17(r.lag) + "," + fmt17(r.moment) + "," + fmt17(r.std_error) + "\n";
  return s;
}

std::string to_csv(const std::vector<WeakLimitPoint>& pts) {
  std::string s = "t,mean_square_error,stderr\n";
  for (const auto& p : pts) s += fmt17(p.t) + "," + fmt17(p.mean_square_error) + "," + fmt17(p.std_error) + "\n";
  return s;
}

std::string ensemble_csv(const FieldEnsemble& e) {
  std::ostringstream os;
  os << "replica,t,x,u,I\n";
  for (int r = 0; r < e.replicas; ++r)
    for (std::size_t i = 0; i < e.nt_rec(); ++i)
      for (std::size_t j = 0; j < e.nx_rec(); ++j)
        os << r << ',' << fmt17(e.time(i)) << ',' << fmt17(e.space(j)) << ',' << fmt17(e.u(r, i, j)) << ','
           << fmt17(e.I(r, i, j)) << '\n';
  return os.str();
}

}  // namespace roughshe
