#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roughshe {

// One randomized check of a kernel identity or inequality.
struct LemmaResult {
  std::string id;
  std::string kind;  // identity | inequality | quadrature
  int trials = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyOptions {
  std::uint64_t seed = 20241016;
  int trials = 1000;
  // Lemma id whose left-hand side is scaled by (1 + 1e-6); empty: none.
  std::string inject_fault;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::string injected_fault;
  std::vector<LemmaResult> lemmas;
  bool all_pass() const;
};

const std::vector<std::string>& lemma_ids();
VerifyReport run_verify(const VerifyOptions& opt = {});

}  // namespace roughshe
