#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughshe/simulator.hpp"

namespace roughshe {

enum class Direction { time, space };
enum class FieldView { I, u };
// dense: every admissible node of the window is an anchor.
// left_edge: anchors sit on the lower edge of the lag direction only
// (t = t_lo for time lags, x = x_lo for space lags).
enum class AnchorMode { dense, left_edge };

const char* to_string(Direction d);

struct Window {
  double t_lo, t_hi, x_lo, x_hi;
};

struct IncrementRow {
  double lag;
  int lag_steps;
  double moment;
  double std_error;
  long anchors;
};

struct IncrementTable {
  int p = 2;
  Direction direction = Direction::time;
  Window window{};
  std::vector<IncrementRow> rows;
};

struct IncrementOptions {
  FieldView field = FieldView::I;
  AnchorMode anchors = AnchorMode::dense;
};

// E|X(t+l,x) - X(t,x)|^p (or the space analogue) for each lag, lags given in
// grid steps (dt or dx units). Replica-wise anchor means first, then the mean
// over replicas; the standard error comes from the spread across replicas.
IncrementTable moment_increments(const FieldEnsemble& e, int p, Direction dir, const Window& w,
                                 const std::vector<int>& lag_steps, const IncrementOptions& opt = {});

// Dyadic lags base, 2 base, 4 base, ... up to a quarter of the window extent.
std::vector<int> dyadic_lags(const FieldEnsemble& e, Direction dir, const Window& w, int base = 1);

struct HolderEstimate {
  double exponent = 0.0;
  double std_error = 0.0;
  int p = 2;
  Direction direction = Direction::time;
  Window window{};
  std::vector<double> lags;
  double r_squared = 0.0;
  int excluded = 0;  // rows dropped for nonpositive moments
};

// Weighted least squares of log moment on log lag; exponent = slope / p.
HolderEstimate fit_exponent(const IncrementTable& table);

// Near t = 0 the estimate is taken from u with anchors on the singular edge.
HolderEstimate near_zero_exponent(const FieldEnsemble& e, int p, Direction dir, const Window& w,
                                  const std::vector<int>& lag_steps);

struct WeakLimitPoint {
  double t;
  double mean_square_error;
  double std_error;
};

// E[(sum_j u(t,x_j) phi(x_j) dx - target)^2] at each recorded time in `times`.
std::vector<WeakLimitPoint> weak_limit_error(const FieldEnsemble& e, const std::function<double(double)>& phi,
                                             double target, const std::vector<double>& times);

// Runs the simulation with the needed slices and evaluates the statistic;
// target = int phi d mu.
std::vector<WeakLimitPoint> weak_limit_error(const InitialMeasure& m, const RhoSpec& rho, double nu,
                                             const GridSpec& grid, NoiseSeed seed, int replicas,
                                             const std::function<double(double)>& phi, const std::vector<double>& times,
                                             int threads = 0);

// exp(-x^2/(2 sigma^2)) cut off at 6 sigma
std::function<double(double)> gaussian_bump(double sigma);
// int phi d mu, atoms exactly, density by quadrature
double integrate_against(const InitialMeasure& m, const std::function<double(double)>& phi, double support_half_width);

// tau(z, z') = sum_i |z_i - z'_i|^{alpha_i}
struct AnisotropicMetric {
  std::vector<double> alphas;
  explicit AnisotropicMetric(std::vector<double> a);
  double operator()(const std::vector<double>& z1, const std::vector<double>& z2) const;
};

// Synthetic ensembles with known scaling along time: each (replica, node)
// column is an independent process in t on the grid t_k = k step.
enum class SyntheticKind { linear, brownian, fbm };
FieldEnsemble synthetic_ensemble(SyntheticKind kind, double beta, int replicas, int n_steps, double step, int n_nodes,
                                 std::uint64_t seed);

}  // namespace roughshe
