#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roughshe/holder_constants.hpp"
#include "roughshe/initial_data.hpp"
#include "roughshe/lemma_suite.hpp"
#include "roughshe/moment_engine.hpp"
#include "roughshe/regularity.hpp"
#include "roughshe/simulator.hpp"

namespace roughshe {

using json = nlohmann::ordered_json;

// %.17g
std::string fmt17(double v);
// Write via a temporary file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& content);

struct RhoConfig {
  std::string mode = "quasi_linear";  // quasi_linear | lipschitz_bound | additive | zero
  double lam = 1.0;
  double varrho = 0.0;
  double lip = 1.0;
  double vip = 0.0;
  RhoSpec build() const;
  bool operator==(const RhoConfig&) const = default;
};

struct MomentsSection {
  std::vector<std::string> quantities{"exact_second_moment"};
  std::vector<double> ts;
  std::vector<double> xs;
  int p = 2;
  bool operator==(const MomentsSection&) const = default;
};

struct SyntheticSection {
  std::string kind = "fbm";
  double beta = 0.5;
  int replicas = 200;
  int n_steps = 256;
  double step = 1.0 / 256;
  int n_nodes = 4;
  bool operator==(const SyntheticSection&) const = default;
};

struct PowerLawSection {
  double a = 0.25;
  std::vector<double> ts;
  bool operator==(const PowerLawSection&) const = default;
};

struct HolderSection {
  int p = 2;
  std::vector<std::string> directions{"time", "space"};
  Window window{0.5, 1.0, -1.0, 1.0};
  std::vector<int> lags_time;   // empty: dyadic
  std::vector<int> lags_space;  // empty: dyadic
  std::string field = "I";
  std::string anchors = "dense";
  bool near_zero = false;
  std::optional<SyntheticSection> synthetic;
  std::optional<PowerLawSection> power_law;
  bool operator==(const HolderSection&) const;
};

struct WeakLimitSection {
  double phi_sigma = 0.5;
  std::vector<double> times;
  bool operator==(const WeakLimitSection&) const = default;
};

struct ExperimentConfig {
  std::string command;
  double nu = 1.0;
  std::optional<InitialMeasure> measure;
  RhoConfig rho;
  GridSpec grid;
  std::uint64_t seed = 0;
  int replicas = 1;
  bool warm_start = false;
  ObservationWindow window;
  double window_half_width = 0.0;
  MomentsSection moments;
  HolderSection holder;
  WeakLimitSection weaklimit;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Throws ValidationError with the offending field path.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);
json to_json(const ExperimentConfig& c);

json to_json(const InitialMeasure& m);
InitialMeasure parse_measure(const json& j, const std::string& path = "measure");
json to_json(const GridSpec& g);

json to_json(const VerifyReport& r);
json to_json(const HolderEstimate& e);
json to_json(const IncrementTable& t);
json to_json(const IncrementBoundConstants& k);
std::string to_csv(const IncrementTable& t);
std::string to_csv(const std::vector<WeakLimitPoint>& pts);
// replica, t, x, u, I
std::string ensemble_csv(const FieldEnsemble& e);

}  // namespace roughshe
