#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace roughshe {

using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
inline Philox4x32Ctr philox4x32(Philox4x32Ctr ctr, Philox4x32Key key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

inline double u01_from_word(std::uint32_t w) { return (static_cast<double>(w) + 0.5) * 0x1p-32; }

// Standard normal variates addressed by (seed, replica, step, cell).
// The same address always yields the same number.
class NoiseField {
 public:
  explicit NoiseField(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  // Normals for cells 4b .. 4b+3 at (replica, step).
  void block(std::uint32_t replica, std::uint32_t step, std::uint32_t b, double out[4]) const;

  double normal(std::uint32_t replica, std::uint32_t step, std::uint32_t cell) const {
    double buf[4];
    block(replica, step, cell / 4, buf);
    return buf[cell % 4];
  }

  // Fill out[0..n) with the normals of cells 0..n-1 at (replica, step).
  void fill(std::uint32_t replica, std::uint32_t step, double* out, std::uint32_t n) const;

 private:
  double slow_path(std::uint32_t replica, std::uint32_t step, std::uint32_t b, int lane, std::uint32_t word) const;
  Philox4x32Key key_;
};

namespace zig {
struct Tables {
  double x[129];
  double ratio[128];
};
const Tables& tables();
}  // namespace zig

}  // namespace roughshe
