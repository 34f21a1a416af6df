#include "roughshe/rng.hpp"

namespace roughshe {

namespace zig {

// 128-layer ziggurat of Marsaglia and Tsang in Doornik's ZIGNOR layout.
static Tables build() {
  constexpr double R = 3.442619855899;
  constexpr double V = 9.91256303526217e-3;
  Tables t{};
  double f = std::exp(-0.5 * R * R);
  t.x[0] = V / f;
  t.x[1] = R;
  t.x[128] = 0.0;
  for (int i = 2; i < 128; ++i) {
    t.x[i] = std::sqrt(-2.0 * std::log(V / t.x[i - 1] + f));
    f = std::exp(-0.5 * t.x[i] * t.x[i]);
  }
  for (int i = 0; i < 128; ++i) t.ratio[i] = t.x[i + 1] / t.x[i];
  return t;
}

const Tables& tables() {
  static const Tables t = build();
  return t;
}

}  // namespace zig

namespace {

constexpr double kZigR = 3.442619855899;

// word -> (layer, signed uniform in (-1, 1)) : 7 bits layer, 25 bits uniform
inline void split_word(std::uint32_t w, int& layer, double& u) {
  layer = static_cast<int>(w & 0x7Fu);
  u = (static_cast<double>(w >> 7) + 0.5) * 0x1p-24 - 1.0;
}

}  // namespace

double NoiseField::slow_path(std::uint32_t replica, std::uint32_t step, std::uint32_t b, int lane,
                             std::uint32_t word) const {
  const auto& T = zig::tables();
  int layer;
  double u;
  split_word(word, layer, u);
  // Each retry consumes a fresh Philox block on the fourth counter word.
  for (std::uint32_t k = 0;; ++k) {
    const auto w = philox4x32({b, step, replica, static_cast<std::uint32_t>(lane) + 1u + 4u * k}, key_);
    if (std::abs(u) < T.ratio[layer]) return u * T.x[layer];
    if (layer == 0) {
      const double x = std::log(u01_from_word(w[0])) / kZigR;
      const double y = std::log(u01_from_word(w[1]));
      if (-2.0 * y >= x * x) return u < 0.0 ? x - kZigR : kZigR - x;
    } else {
      const double x = u * T.x[layer];
      const double f0 = std::exp(-0.5 * (T.x[layer] * T.x[layer] - x * x));
      const double f1 = std::exp(-0.5 * (T.x[layer + 1] * T.x[layer + 1] - x * x));
      if (f1 + u01_from_word(w[0]) * (f0 - f1) < 1.0) return x;
    }
    split_word(w[3], layer, u);
  }
}

void NoiseField::block(std::uint32_t replica, std::uint32_t step, std::uint32_t b, double out[4]) const {
  const auto& T = zig::tables();
  const auto w = philox4x32({b, step, replica, 0u}, key_);
  for (int lane = 0; lane < 4; ++lane) {
    int layer;
    double u;
    split_word(w[lane], layer, u);
    out[lane] = std::abs(u) < T.ratio[layer] ? u * T.x[layer] : slow_path(replica, step, b, lane, w[lane]);
  }
}

void NoiseField::fill(std::uint32_t replica, std::uint32_t step, double* out, std::uint32_t n) const {
  const std::uint32_t full = n / 4;
  for (std::uint32_t b = 0; b < full; ++b) block(replica, step, b, out + 4 * b);
  if (n % 4) {
    double tmp[4];
    block(replica, step, full, tmp);
    for (std::uint32_t i = 0; i < n % 4; ++i) out[4 * full + i] = tmp[i];
  }
}

}  // namespace roughshe
