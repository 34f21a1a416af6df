#include "roughshe/regularity.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "roughshe/error.hpp"
#include "roughshe/quadrature.hpp"
#include "roughshe/rng.hpp"

namespace roughshe {

const char* to_string(Direction d) { return d == Direction::time ? "time" : "space"; }

namespace {

// Pairwise (cascade) summation; order-fixed so results do not depend on scheduling.
double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

std::vector<std::size_t> in_range(std::size_t n, double lo, double hi, auto&& coord) {
  std::vector<std::size_t> out;
  const double eps = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (std::size_t i = 0; i < n; ++i) {
    const double c = coord(i);
    if (c >= lo - eps && c <= hi + eps) out.push_back(i);
  }
  return out;
}

struct MeanSe {
  double mean, se;
};

// Mean over replicas; the error bar is widened by sqrt((1+r1)/(1-r1)) when the
// replica sequence shows positive lag-1 correlation.
MeanSe replica_mean_se(const std::vector<double>& per_rep) {
  const std::size_t R = per_rep.size();
  const double mean = pairwise_sum(per_rep) / static_cast<double>(R);
  if (R < 2) return {mean, 0.0};
  std::vector<double> d2(R), lag(R - 1);
  for (std::size_t r = 0; r < R; ++r) d2[r] = (per_rep[r] - mean) * (per_rep[r] - mean);
  for (std::size_t r = 0; r + 1 < R; ++r) lag[r] = (per_rep[r] - mean) * (per_rep[r + 1] - mean);
  const double ss = pairwise_sum(d2);
  const double var = ss / static_cast<double>(R - 1);
  double se = std::sqrt(var / static_cast<double>(R));
  if (ss > 0.0) {
    const double r1 = std::clamp(pairwise_sum(lag) / ss, 0.0, 0.9);
    se *= std::sqrt((1.0 + r1) / (1.0 - r1));
  }
  return {mean, se};
}

void check_p(int p) {
  if (p < 2 || p % 2 != 0) throw ValidationError("p", "must be an even integer >= 2");
}

}  // namespace

std::vector<int> dyadic_lags(const FieldEnsemble& e, Direction dir, const Window& w, int base) {
  if (base < 1) throw ValidationError("lags.base", "must be >= 1");
  const double h = dir == Direction::time ? e.grid.dt() : e.grid.dx();
  const double extent = dir == Direction::time ? w.t_hi - w.t_lo : w.x_hi - w.x_lo;
  std::vector<int> out;
  for (long l = base; l * h <= 0.25 * extent * (1.0 + 1e-12); l *= 2) out.push_back(static_cast<int>(l));
  return out;
}

IncrementTable moment_increments(const FieldEnsemble& e, int p, Direction dir, const Window& w,
                                 const std::vector<int>& lag_steps, const IncrementOptions& opt) {
  check_p(p);
  if (e.replicas < 1) throw ValidationError("ensemble", "no replicas");
  if (!(w.t_hi >= w.t_lo) || !(w.x_hi >= w.x_lo)) throw ValidationError("window", "empty window");
  if (lag_steps.empty()) throw ValidationError("lags", "no lags given");
  for (std::size_t k = 0; k < lag_steps.size(); ++k) {
    if (lag_steps[k] < 1) throw ValidationError("lags", "lags must be positive grid multiples");
    if (k > 0 && lag_steps[k] <= lag_steps[k - 1]) throw ValidationError("lags", "lags must be strictly increasing");
  }
  const auto ti = in_range(e.nt_rec(), w.t_lo, w.t_hi, [&](std::size_t i) { return e.time(i); });
  const auto xi = in_range(e.nx_rec(), w.x_lo, w.x_hi, [&](std::size_t j) { return e.space(j); });
  if (ti.empty() || xi.empty()) throw ValidationError("window", "empty window: no recorded nodes inside");

  const bool time_dir = dir == Direction::time;
  const double h = time_dir ? e.grid.dt() : e.grid.dx();
  const double extent = time_dir ? w.t_hi - w.t_lo : w.x_hi - w.x_lo;
  // recorded position of each raw step / node, restricted to the window
  const int raw_n = time_dir ? e.grid.nt + 1 : e.grid.nx + 1;
  std::vector<int> pos(raw_n, -1);
  const auto& along = time_dir ? ti : xi;
  for (std::size_t k : along) pos[time_dir ? e.t_index[k] : e.x_index[k]] = static_cast<int>(k);
  const auto& across = time_dir ? xi : ti;

  auto field = [&](std::size_t r, std::size_t i, std::size_t j) {
    return opt.field == FieldView::I ? e.I(r, i, j) : e.u(r, i, j);
  };

  IncrementTable table;
  table.p = p;
  table.direction = dir;
  table.window = w;
  for (int L : lag_steps) {
    if (L * h > extent * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "lag " << L * h << " exceeds the window extent " << extent;
      throw ValidationError("lags", os.str());
    }
    // anchor pairs (a, b) along the lag direction
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t k : along) {
      const int raw = time_dir ? e.t_index[k] : e.x_index[k];
      if (raw + L < raw_n && pos[raw + L] >= 0) pairs.emplace_back(static_cast<int>(k), pos[raw + L]);
      if (opt.anchors == AnchorMode::left_edge) break;
    }
    if (pairs.empty()) {
      std::ostringstream os;
      os << "lag of " << L << " steps has no anchor pair on the recorded grid";
      throw ValidationError("lags", os.str());
    }
    const long n_anchor = static_cast<long>(pairs.size() * across.size());
    std::vector<double> per_rep(e.replicas), buf(n_anchor);
    for (int r = 0; r < e.replicas; ++r) {
      std::size_t q = 0;
      for (const auto& [a, b] : pairs)
        for (std::size_t c : across) {
          const double d = time_dir ? field(r, b, c) - field(r, a, c) : field(r, c, b) - field(r, c, a);
          buf[q++] = ipow(std::abs(d), p);
        }
      per_rep[r] = pairwise_sum(buf) / static_cast<double>(n_anchor);
    }
    const auto ms = replica_mean_se(per_rep);
    table.rows.push_back({L * h, L, ms.mean, ms.se, n_anchor});
  }
  return table;
}

HolderEstimate fit_exponent(const IncrementTable& table) {
  check_p(table.p);
  HolderEstimate est;
  est.p = table.p;
  est.direction = table.direction;
  est.window = table.window;
  std::vector<double> X, Y, W;
  bool weighted = true;
  for (const auto& row : table.rows) {
    if (!(row.moment > 0.0) || !std::isfinite(row.moment) || !(row.lag > 0.0)) {
      ++est.excluded;
      continue;
    }
    X.push_back(std::log(row.lag));
    Y.push_back(std::log(row.moment));
    if (!(row.std_error > 0.0)) weighted = false;
    W.push_back(row.std_error > 0.0 ? (row.moment / row.std_error) * (row.moment / row.std_error) : 1.0);
    est.lags.push_back(row.lag);
  }
  const std::size_t n = X.size();
  if (n < 4) {
    std::ostringstream os;
    os << "fewer than 4 usable lags (" << n << " usable, " << est.excluded << " excluded as nonpositive)";
    throw ValidationError("lags", os.str());
  }
  for (std::size_t k = 1; k < n; ++k)
    if (!(est.lags[k] > est.lags[k - 1])) throw ValidationError("lags", "lags must be strictly increasing");
  if (est.lags.back() / est.lags.front() < 10.0 * (1.0 - 1e-12))
    throw ValidationError("lags", "usable lags must span at least one decade");
  if (!weighted) std::fill(W.begin(), W.end(), 1.0);

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sw += W[k];
    sx += W[k] * X[k];
    sy += W[k] * Y[k];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += W[k] * (X[k] - mx) * (X[k] - mx);
    sxy += W[k] * (X[k] - mx) * (Y[k] - my);
    syy += W[k] * (Y[k] - my) * (Y[k] - my);
  }
  const double slope = sxy / sxx;
  const double icept = my - slope * mx;
  double chi2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double res = Y[k] - icept - slope * X[k];
    chi2 += W[k] * res * res;
  }
  const double red = chi2 / static_cast<double>(n - 2);
  // absolute weights: scale up by the reduced chi^2 only when it exceeds 1
  const double s2 = weighted ? std::max(1.0, red) : red;
  est.exponent = slope / table.p;
  est.std_error = std::sqrt(s2 / sxx) / table.p;
  est.r_squared = syy > 0.0 ? 1.0 - chi2 / syy : 1.0;
  return est;
}

HolderEstimate near_zero_exponent(const FieldEnsemble& e, int p, Direction dir, const Window& w,
                                  const std::vector<int>& lag_steps) {
  IncrementOptions opt;
  opt.field = FieldView::u;
  opt.anchors = AnchorMode::left_edge;
  return fit_exponent(moment_increments(e, p, dir, w, lag_steps, opt));
}

std::vector<WeakLimitPoint> weak_limit_error(const FieldEnsemble& e, const std::function<double(double)>& phi,
                                             double target, const std::vector<double>& times) {
  if (e.replicas < 2) throw ValidationError("replicas", "ensemble too small: need >= 2 replicas for an error bar");
  if (times.empty()) throw ValidationError("times", "empty time list");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0)) throw ValidationError("times", "times must be positive");
    if (k > 0 && !(times[k] < times[k - 1])) throw ValidationError("times", "times must be strictly decreasing");
  }
  const std::size_t nx = e.nx_rec();
  std::vector<double> wts(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    // trapezoid weights on the recorded nodes
    const double left = j > 0 ? e.space(j) - e.space(j - 1) : 0.0;
    const double right = j + 1 < nx ? e.space(j + 1) - e.space(j) : 0.0;
    wts[j] = 0.5 * (left + right) * phi(e.space(j));
  }
  std::vector<WeakLimitPoint> out;
  for (double t : times) {
    std::size_t i = e.nt_rec();
    for (std::size_t k = 0; k < e.nt_rec(); ++k)
      if (std::abs(e.time(k) - t) <= 1e-9 * std::max(1.0, t)) i = k;
    if (i == e.nt_rec()) {
      std::ostringstream os;
      os << "time " << t << " is not a recorded slice";
      throw ValidationError("times", os.str());
    }
    std::vector<double> err(e.replicas), buf(nx);
    for (int r = 0; r < e.replicas; ++r) {
      for (std::size_t j = 0; j < nx; ++j) buf[j] = e.u(r, i, j) * wts[j];
      const double d = pairwise_sum(buf) - target;
      err[r] = d * d;
    }
    const auto ms = replica_mean_se(err);
    out.push_back({t, ms.mean, ms.se});
  }
  return out;
}

std::vector<WeakLimitPoint> weak_limit_error(const InitialMeasure& m, const RhoSpec& rho, double nu,
                                             const GridSpec& grid, NoiseSeed seed, int replicas,
                                             const std::function<double(double)>& phi, const std::vector<double>& times,
                                             int threads) {
  SimOptions opt;
  opt.threads = threads;
  for (double t : times) {
    const double steps = t / grid.dt();
    const long k = std::lround(steps);
    if (std::abs(steps - k) > 1e-6 || k < 1 || k > grid.nt) {
      std::ostringstream os;
      os << "time " << t << " is not a positive multiple of dt within the grid";
      throw ValidationError("times", os.str());
    }
    opt.window.t_indices.push_back(static_cast<int>(k));
  }
  const auto e = simulate(m, rho, nu, grid, seed, replicas, opt);
  return weak_limit_error(e, phi, integrate_against(m, phi, grid.L), times);
}

std::function<double(double)> gaussian_bump(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("phi.sigma", "must be positive");
  return [sigma](double x) {
    const double z = x / sigma;
    return std::abs(z) < 6.0 ? std::exp(-0.5 * z * z) : 0.0;
  };
}

double integrate_against(const InitialMeasure& m, const std::function<double(double)>& phi, double support_half_width) {
  double s = 0.0;
  for (const auto& a : m.atoms) s += a.w * phi(a.x);
  if (m.density) {
    const double h = support_half_width;
    const double pts[] = {-h, 0.0, h};
    QuadratureSpec spec{1e-13, 1e-11, 4000, 12};
    auto f = [&](double x) { return (*m.density)(x) * phi(x); };
    s += require_converged(integrate_panels(f, std::span<const double>(pts), spec), "integrate_against");
  }
  return s;
}

AnisotropicMetric::AnisotropicMetric(std::vector<double> a) : alphas(std::move(a)) {
  if (alphas.empty()) throw ValidationError("alphas", "need at least one exponent");
  for (double x : alphas)
    if (!(x > 0.0 && x <= 1.0)) throw ValidationError("alphas", "each exponent must lie in (0, 1]");
}

double AnisotropicMetric::operator()(const std::vector<double>& z1, const std::vector<double>& z2) const {
  if (z1.size() != alphas.size() || z2.size() != alphas.size())
    throw std::invalid_argument("AnisotropicMetric: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) s += std::pow(std::abs(z1[i] - z2[i]), alphas[i]);
  return s;
}

FieldEnsemble synthetic_ensemble(SyntheticKind kind, double beta, int replicas, int n_steps, double step, int n_nodes,
                                 std::uint64_t seed) {
  if (replicas < 1 || n_steps < 2 || n_nodes < 1 || !(step > 0.0))
    throw ValidationError("synthetic", "need replicas >= 1, n_steps >= 2, n_nodes >= 1, step > 0");
  if (kind == SyntheticKind::fbm && !(beta > 0.0 && beta <= 1.0))
    throw ValidationError("synthetic.beta", "must lie in (0, 1]");
  FieldEnsemble e;
  e.grid.L = 1.0;
  e.grid.nx = std::max(1, n_nodes - 1);
  e.grid.nt = n_steps;
  e.grid.t_max = n_steps * step;
  e.nu = 1.0;
  e.replicas = replicas;
  e.seed.master_seed = seed;
  e.t_index.resize(n_steps + 1);
  std::iota(e.t_index.begin(), e.t_index.end(), 0);
  e.x_index.resize(n_nodes);
  std::iota(e.x_index.begin(), e.x_index.end(), 0);
  const std::size_t NT = n_steps + 1, NX = n_nodes;
  e.j0_slice.assign(NT * NX, 0.0);
  e.values.assign(static_cast<std::size_t>(replicas) * NT * NX, 0.0);

  Eigen::MatrixXd chol;
  if (kind == SyntheticKind::fbm && beta < 1.0) {
    const double H2 = 2.0 * beta;
    Eigen::MatrixXd cov(n_steps, n_steps);
    for (int a = 0; a < n_steps; ++a)
      for (int b = 0; b < n_steps; ++b) {
        const double s = (a + 1) * step, t = (b + 1) * step;
        cov(a, b) = 0.5 * (std::pow(s, H2) + std::pow(t, H2) - std::pow(std::abs(s - t), H2));
      }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("synthetic_ensemble: fBm covariance not positive definite");
    chol = llt.matrixL();
  }
  const NoiseField noise(seed);
  Eigen::VectorXd z(n_steps);
  for (int r = 0; r < replicas; ++r)
    for (int j = 0; j < n_nodes; ++j) {
      noise.fill(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(j), z.data(), n_steps);
      double* col = e.values.data() + static_cast<std::size_t>(r) * NT * NX + j;
      switch (kind) {
        case SyntheticKind::linear:
          for (int k = 0; k <= n_steps; ++k) col[k * NX] = k * step;
          break;
        case SyntheticKind::brownian: {
          double acc = 0.0;
          for (int k = 1; k <= n_steps; ++k) {
            acc += std::sqrt(step) * z[k - 1];
            col[k * NX] = acc;
          }
          break;
        }
        case SyntheticKind::fbm:
          if (beta >= 1.0) {
            for (int k = 0; k <= n_steps; ++k) col[k * NX] = k * step * z[0];
          } else {
            const Eigen::VectorXd path = chol * z;
            for (int k = 1; k <= n_steps; ++k) col[k * NX] = path[k - 1];
          }
          break;
      }
    }
  return e;
}

}  // namespace roughshe
