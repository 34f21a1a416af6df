#include "roughshe/quadrature.hpp"

#include <sstream>

namespace roughshe {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol)) throw ValidationError("quadrature.abs_tol", "must be positive");
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) throw ValidationError("quadrature.rel_tol", "must be positive");
  if (max_subdivisions < 1) throw ValidationError("quadrature.max_subdivisions", "must be >= 1");
  if (!(gaussian_tail_sigmas > 0.0)) throw ValidationError("quadrature.gaussian_tail_sigmas", "must be positive");
}

std::vector<double> feature_breakpoints(std::span<const Feature> features, double tail_sigmas) {
  std::vector<double> pts;
  if (features.empty()) return {-tail_sigmas, tail_sigmas};
  double lo = features[0].center;
  double hi = features[0].center;
  double wmax = 0.0;
  for (const auto& f : features) {
    lo = std::min(lo, f.center);
    hi = std::max(hi, f.center);
    wmax = std::max(wmax, f.width);
  }
  if (!(wmax > 0.0)) wmax = 1.0;
  lo -= tail_sigmas * wmax;
  hi += tail_sigmas * wmax;
  pts.reserve(features.size() * 9 + 2);
  pts.push_back(lo);
  pts.push_back(hi);
  for (const auto& f : features) {
    // out to 12 widths: a narrow feature next to a wide one would otherwise
    // leave its 3-sigma tail inside a panel whose nodes all miss it
    for (double k : {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0}) {
      const double p = f.center + k * f.width;
      if (p > lo && p < hi) pts.push_back(p);
    }
  }
  std::sort(pts.begin(), pts.end());
  // merge points closer than a tiny fraction of the domain
  const double tiny = 1e-12 * (hi - lo);
  std::vector<double> out;
  out.reserve(pts.size());
  for (double p : pts) {
    if (out.empty() || p - out.back() > tiny) out.push_back(p);
  }
  if (out.back() < hi) out.back() = hi;
  return out;
}

double require_converged(const QuadratureResult& r, const char* what) {
  if (!r.converged) {
    std::ostringstream os;
    os << what << ": quadrature did not converge (estimate " << r.value << ", error " << r.abs_error
       << ", subdivisions " << r.subdivisions << ")";
    throw NumericalError(os.str(), r.abs_error);
  }
  return r.value;
}

}  // namespace roughshe
