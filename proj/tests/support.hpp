// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "deformed/deformed.hpp"

namespace deformed {

inline void PrintTo(const LogFamily& fam, std::ostream* os) { *os << fam.label(); }

}  // namespace deformed

namespace deformed::testing {

inline std::vector<LogFamily> all_families() {
  return default_scan_families();
}

/// Random pdf of length n from a fixed stream; every third draw is sparse.
class PdfSource {
 public:
  explicit PdfSource(std::uint64_t seed) : sampler_(SplitMix64(seed)) {}

  Pdf next(std::size_t n) {
    return ++count_ % 3 == 0 ? sampler_.sparse(n) : sampler_.uniform(n);
  }
  Pdf positive(std::size_t n) { return sampler_.uniform(n); }
  double uniform() { return sampler_.rng().uniform(); }
  std::size_t below(std::size_t n) { return sampler_.rng().below(n); }

 private:
  SimplexSampler sampler_;
  std::size_t count_ = 0;
};

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace deformed::testing
