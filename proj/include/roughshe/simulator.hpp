#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughshe/initial_data.hpp"
#include "roughshe/moment_engine.hpp"

namespace roughshe {

// Nodes x_j = -L + j dx, j = 0..nx, dx = 2L/nx; times t_m = m dt, m = 0..nt.
struct GridSpec {
  double L = 6.0;
  int nx = 240;
  double t_max = 0.5;
  int nt = 800;

  double dx() const { return 2.0 * L / nx; }
  double dt() const { return t_max / nt; }
  double x(int j) const { return -L + dx() * j; }
  double t(int m) const { return dt() * m; }
  int nearest_node(double x) const;
  // nu dt / dx^2 <= 1/2 and L >= half_width + 6 sqrt(nu t_max)
  void validate(double nu, double window_half_width = 0.0) const;

  // Grid with spacing dx on [-L, L] and dt = ratio dx^2 up to t_max (t_max rounded to whole steps).
  static GridSpec from_spacing(double L, double dx, double t_max, double dt_over_dx2);
};

struct NoiseSeed {
  std::uint64_t master_seed = 0;
};

// Which slices of the evolution are kept.
struct ObservationWindow {
  std::vector<int> t_indices;  // if empty: t_begin..t_end by t_stride
  int t_begin = 0;
  int t_end = -1;  // -1: last step
  int t_stride = 1;
  int x_begin = 0;
  int x_end = -1;  // -1: last node
  int x_stride = 1;
};

struct SimOptions {
  bool warm_start = false;
  int threads = 0;  // 0: hardware concurrency
  ObservationWindow window;
  double window_half_width = 0.0;  // for the truncation guard
};

struct FieldEnsemble {
  GridSpec grid;
  double nu = 1.0;
  int replicas = 0;
  NoiseSeed seed;
  bool warm_start = false;
  bool replaced_singular_nodes = false;
  std::vector<int> t_index;    // recorded time steps
  std::vector<int> x_index;    // recorded nodes
  std::vector<double> values;  // [replica][time][space]
  std::vector<double> j0_slice;  // [time][space]

  std::size_t nt_rec() const { return t_index.size(); }
  std::size_t nx_rec() const { return x_index.size(); }
  double time(std::size_t i) const { return grid.t(t_index[i]); }
  double space(std::size_t j) const { return grid.x(x_index[j]); }
  double u(std::size_t r, std::size_t i, std::size_t j) const {
    return values[(r * nt_rec() + i) * nx_rec() + j];
  }
  double I(std::size_t r, std::size_t i, std::size_t j) const { return u(r, i, j) - j0_slice[i * nx_rec() + j]; }
};

FieldEnsemble simulate(const InitialMeasure& m, const RhoSpec& rho, double nu, const GridSpec& grid, NoiseSeed seed,
                       int replicas, const SimOptions& opt = {});

// Replica slice, [time][space].
std::vector<double> sample_path(const FieldEnsemble& e, int replica);

// Initial grid values: atoms as weight/dx at the nearest node (ties to the
// left), densities sampled at the nodes.
std::vector<double> initial_slice(const InitialMeasure& m, const GridSpec& grid);

}  // namespace roughshe
