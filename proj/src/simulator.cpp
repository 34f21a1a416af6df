#include "roughshe/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "roughshe/gaussian_kernel.hpp"
#include "roughshe/rng.hpp"

namespace roughshe {

int GridSpec::nearest_node(double x) const {
  const double pos = (x + L) / dx();
  const double fl = std::floor(pos);
  // exact midpoints go to the left node
  int j = (pos - fl > 0.5) ? static_cast<int>(fl) + 1 : static_cast<int>(fl);
  return std::clamp(j, 0, nx);
}

void GridSpec::validate(double nu, double window_half_width) const {
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("grid.L", "must be positive");
  if (nx < 3) throw ValidationError("grid.nx", "must be >= 3");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("grid.t_max", "must be positive");
  if (nt < 1) throw ValidationError("grid.nt", "must be >= 1");
  const double cfl = nu * dt() / (dx() * dx());
  if (cfl > 0.5 + 1e-12) {
    std::ostringstream os;
    os << "unstable: nu dt / dx^2 = " << cfl << " > 1/2";
    throw ValidationError("grid.nt", os.str());
  }
  const double need = window_half_width + 6.0 * std::sqrt(nu * t_max);
  if (L < need - 1e-12) {
    std::ostringstream os;
    os << "truncation guard: L = " << L << " < window half-width + 6 sqrt(nu t_max) = " << need;
    throw ValidationError("grid.L", os.str());
  }
}

GridSpec GridSpec::from_spacing(double L, double dx, double t_max, double dt_over_dx2) {
  GridSpec g;
  g.L = L;
  g.nx = static_cast<int>(std::lround(2.0 * L / dx));
  const double dt = dt_over_dx2 * dx * dx;
  g.nt = std::max(1, static_cast<int>(std::lround(t_max / dt)));
  g.t_max = g.nt * dt;
  return g;
}

std::vector<double> initial_slice(const InitialMeasure& m, const GridSpec& grid) {
  std::vector<double> u(grid.nx + 1, 0.0);
  const double dx = grid.dx();
  if (m.density)
    for (int j = 0; j <= grid.nx; ++j) u[j] = (*m.density)(grid.x(j));
  for (const auto& at : m.atoms) {
    if (at.x < -grid.L || at.x > grid.L) continue;
    u[grid.nearest_node(at.x)] += at.w / dx;
  }
  return u;
}

namespace {

enum class RhoKind { linear, affine_sqrt, constant, general };

struct RhoFast {
  RhoKind kind;
  double a = 0.0;  // slope / multiplier / constant
  double b = 0.0;  // varrho^2
  const RhoSpec* spec = nullptr;

  explicit RhoFast(const RhoSpec& r) : spec(&r) {
    if (r.mode == RhoMode::quasi_linear) {
      a = r.lam;
      b = r.varrho * r.varrho;
      kind = b == 0.0 ? RhoKind::linear : RhoKind::affine_sqrt;
    } else if (r.mode == RhoMode::lipschitz_bound) {
      a = r.lip;
      b = r.vip * r.vip;
      kind = b == 0.0 ? RhoKind::linear : RhoKind::affine_sqrt;
    } else if (r.name == "additive" || r.name == "zero") {
      a = r(0.0);
      kind = RhoKind::constant;
    } else {
      kind = RhoKind::general;
    }
  }
};

std::vector<int> resolve_range(const std::vector<int>& explicit_idx, int begin, int end, int stride, int last,
                               const char* what) {
  std::vector<int> out;
  if (!explicit_idx.empty()) {
    out = explicit_idx;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  } else {
    if (end < 0) end = last;
    if (stride < 1) throw ValidationError(std::string("window.") + what + "_stride", "must be >= 1");
    for (int i = begin; i <= end; i += stride) out.push_back(i);
  }
  if (out.empty()) throw ValidationError(std::string("window.") + what, "empty observation window");
  if (out.front() < 0 || out.back() > last) throw ValidationError(std::string("window.") + what, "index outside the grid");
  return out;
}

}  // namespace

FieldEnsemble simulate(const InitialMeasure& m, const RhoSpec& rho, double nu, const GridSpec& grid, NoiseSeed seed,
                       int replicas, const SimOptions& opt) {
  if (!(nu > 0.0)) throw ValidationError("nu", "must be positive");
  if (!classify(m).in_MH) throw ValidationError("measure", "not in M_H");
  rho.validate();
  grid.validate(nu, opt.window_half_width);
  if (replicas < 1) throw ValidationError("replicas", "must be >= 1");

  FieldEnsemble e;
  e.grid = grid;
  e.nu = nu;
  e.replicas = replicas;
  e.seed = seed;
  e.warm_start = opt.warm_start;
  const auto& w = opt.window;
  e.t_index = resolve_range(w.t_indices, w.t_begin, w.t_end, w.t_stride, grid.nt, "t");
  e.x_index = resolve_range({}, w.x_begin, w.x_end, w.x_stride, grid.nx, "x");
  const int NX = grid.nx;
  const int NT = grid.nt;
  const double dt = grid.dt();
  const double dx = grid.dx();

  // initial data; singular nodes (unbounded densities) take J0 at t = dt
  std::vector<double> u0 = initial_slice(m, grid);
  for (int j = 0; j <= NX; ++j) {
    if (!std::isfinite(u0[j])) {
      u0[j] = j0(m, nu, dt, grid.x(j));
      e.replaced_singular_nodes = true;
    }
  }
  std::vector<double> warm;
  if (opt.warm_start) {
    warm.resize(NX + 1);
    for (int j = 0; j <= NX; ++j) warm[j] = j0(m, nu, dt, grid.x(j));
  }
  std::vector<double> bl(NT + 1), br(NT + 1);
  bl[0] = u0[0];
  br[0] = u0[NX];
  for (int k = 1; k <= NT; ++k) {
    bl[k] = j0(m, nu, grid.t(k), -grid.L);
    br[k] = j0(m, nu, grid.t(k), grid.L);
  }

  const std::size_t ntr = e.t_index.size(), nxr = e.x_index.size();
  std::vector<int> rec_of_step(NT + 1, -1);
  for (std::size_t i = 0; i < ntr; ++i) rec_of_step[e.t_index[i]] = static_cast<int>(i);
  e.j0_slice.resize(ntr * nxr);
  for (std::size_t i = 0; i < ntr; ++i) {
    const int k = e.t_index[i];
    for (std::size_t j = 0; j < nxr; ++j) {
      const int jj = e.x_index[j];
      double v;
      if (k == 0) v = u0[jj];
      else if (jj == 0) v = bl[k];
      else if (jj == NX) v = br[k];
      else v = j0(m, nu, grid.t(k), grid.x(jj));
      e.j0_slice[i * nxr + j] = v;
    }
  }
  e.values.assign(static_cast<std::size_t>(replicas) * ntr * nxr, 0.0);

  const double r = nu * dt / (2.0 * dx * dx);
  const double noise_scale = std::sqrt(dt / dx);
  const RhoFast rf(rho);
  const NoiseField field(seed.master_seed);

  std::atomic<int> next{0};
  std::mutex err_mu;
  std::string first_error;
  auto worker = [&]() {
    std::vector<double> u(NX + 1), un(NX + 1), xi(NX + 1);
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= replicas) return;
      double* out = e.values.data() + static_cast<std::size_t>(rep) * ntr * nxr;
      auto record = [&](int step) {
        const int ri = rec_of_step[step];
        if (ri < 0) return;
        for (std::size_t j = 0; j < nxr; ++j) out[ri * nxr + j] = u[e.x_index[j]];
      };
      u = u0;
      record(0);
      int m0 = 0;
      if (opt.warm_start) {
        u = warm;
        m0 = 1;
        record(1);
      }
      bool ok = true;
      for (int k = m0; k < NT && ok; ++k) {
        field.fill(static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(k), xi.data(), NX + 1);
        double mx = 0.0;
        switch (rf.kind) {
          case RhoKind::linear:
            for (int j = 1; j < NX; ++j) {
              const double v = u[j];
              un[j] = v + r * (u[j + 1] - 2.0 * v + u[j - 1]) + rf.a * v * xi[j] * noise_scale;
              mx = std::max(mx, std::abs(un[j]));
            }
            break;
          case RhoKind::affine_sqrt:
            for (int j = 1; j < NX; ++j) {
              const double v = u[j];
              un[j] = v + r * (u[j + 1] - 2.0 * v + u[j - 1]) + rf.a * std::sqrt(rf.b + v * v) * xi[j] * noise_scale;
              mx = std::max(mx, std::abs(un[j]));
            }
            break;
          case RhoKind::constant:
            for (int j = 1; j < NX; ++j) {
              const double v = u[j];
              un[j] = v + r * (u[j + 1] - 2.0 * v + u[j - 1]) + rf.a * xi[j] * noise_scale;
              mx = std::max(mx, std::abs(un[j]));
            }
            break;
          case RhoKind::general:
            for (int j = 1; j < NX; ++j) {
              const double v = u[j];
              un[j] = v + r * (u[j + 1] - 2.0 * v + u[j - 1]) + (*rf.spec)(v) * xi[j] * noise_scale;
              mx = std::max(mx, std::abs(un[j]));
            }
            break;
        }
        un[0] = bl[k + 1];
        un[NX] = br[k + 1];
        std::swap(u, un);
        if (!(mx < 1e300)) {
          ok = false;
          std::lock_guard<std::mutex> lk(err_mu);
          if (first_error.empty()) {
            std::ostringstream os;
            os << "simulate: non-finite or overflowing field in replica " << rep << " at step " << (k + 1)
               << " (t = " << grid.t(k + 1) << ")";
            first_error = os.str();
          }
          break;
        }
        record(k + 1);
      }
    }
  };
  int nthreads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::clamp(nthreads, 1, replicas);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw NumericalError(first_error);
  return e;
}

std::vector<double> sample_path(const FieldEnsemble& e, int replica) {
  if (replica < 0 || replica >= e.replicas) throw std::out_of_range("sample_path: replica index out of range");
  const std::size_t n = e.nt_rec() * e.nx_rec();
  const auto first = e.values.begin() + static_cast<std::ptrdiff_t>(replica * n);
  return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n));
}

}  // namespace roughshe
