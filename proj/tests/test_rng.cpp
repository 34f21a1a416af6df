#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "roughshe/rng.hpp"

using namespace roughshe;

// Known-answer vectors of the Random123 distribution (kat_vectors, philox4x32_10).
TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Philox4x32Ctr{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32Ctr{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32Ctr{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal throughput") {
  NoiseField nf(7);
  std::vector<double> buf(4096);
  const int reps = 2000;
  double acc = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    nf.fill(0, r, buf.data(), buf.size());
    acc += buf[r % buf.size()];
  }
  const double ns = std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count() /
                    (double(reps) * buf.size());
  std::printf("ns per normal: %.2f (%g)\n", ns, acc);
  CHECK(ns < 50.0);
}

TEST_CASE("normal moments and tails") {
  NoiseField nf(2024);
  const std::uint32_t n = 1 << 12;
  std::vector<double> buf(n);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  long tail3 = 0;
  const int rows = 256;  // about 1e6 draws
  for (int r = 0; r < rows; ++r) {
    nf.fill(r % 7, r, buf.data(), n);
    for (double z : buf) {
      s1 += z;
      s2 += z * z;
      s3 += z * z * z;
      s4 += z * z * z * z;
      tail3 += std::abs(z) > 3.0;
    }
  }
  const double N = double(rows) * n;
  // 5 standard errors each
  CHECK(std::abs(s1 / N) < 5.0 / std::sqrt(N));
  CHECK(std::abs(s2 / N - 1.0) < 5.0 * std::sqrt(2.0 / N));
  CHECK(std::abs(s3 / N) < 5.0 * std::sqrt(15.0 / N));
  CHECK(std::abs(s4 / N - 3.0) < 5.0 * std::sqrt(96.0 / N));
  const double p3 = std::erfc(3.0 / std::sqrt(2.0));
  CHECK(std::abs(tail3 / N - p3) < 5.0 * std::sqrt(p3 / N));
}

TEST_CASE("addressing") {
  NoiseField a(99), b(99), c(100);
  std::vector<double> row(37);
  a.fill(3, 11, row.data(), row.size());
  for (std::uint32_t j = 0; j < row.size(); ++j) {
    CHECK(b.normal(3, 11, j) == row[j]);
    CHECK(c.normal(3, 11, j) != row[j]);
  }
  CHECK(a.normal(4, 11, 0) != row[0]);
  CHECK(a.normal(3, 12, 0) != row[0]);
}
