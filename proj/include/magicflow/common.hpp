// Copyright 2026 Magicflow Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>

namespace magicflow {

using cxd = std::complex<double>;

// Tolerances pinned once for the whole library.  Tests assert against these
// same constants, so changing one here changes the contract everywhere.
namespace tol {
inline constexpr double hermitian = 1e-10;       // max |A - A†| entry
inline constexpr double trace_one = 1e-10;       // |Tr ρ - 1|
inline constexpr double psd_floor = -1e-9;       // eigenvalue clamp window
inline constexpr double round_trip = 1e-10;      // char ↔ dense round trips
inline constexpr double unit_modulus = 1e-9;     // |Ξ(x)| = 1 detection
inline constexpr double unitary = 1e-10;         // ‖U†U − I‖ max entry
inline constexpr double clifford_match = 1e-8;   // scalar×Weyl identification
inline constexpr double commutator_zero = 1e-8;  // dense symmetry counting
inline constexpr double canonical_form = 1e-9;   // conjugated mean state check
inline constexpr double entropy_ratio = 1e-4;    // S/log d integrality residual
inline constexpr double duality = 1e-10;         // dense vs char convolution
inline constexpr double support_eps = 1e-12;     // |Ξ(x)| ≠ 0 detection
}  // namespace tol

// Raised when an operation would materialize a matrix whose dimension
// exceeds the configured cap.  The characteristic-function path has no
// such limit; callers are pointed there.
struct size_cap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense operations refuse to materialize matrices of dimension beyond this
// cap (default 2^14).  Overridable through MAGICFLOW_SIZE_CAP.
inline std::int64_t dense_dim_cap() {
  static const std::int64_t cap = [] {
    if (const char* env = std::getenv("MAGICFLOW_SIZE_CAP")) {
      const long long v = std::atoll(env);
      if (v > 0) return static_cast<std::int64_t>(v);
    }
    return static_cast<std::int64_t>(1) << 14;
  }();
  return cap;
}

inline void check_dense_dim(std::int64_t dim, const std::string& what) {
  if (dim > dense_dim_cap()) {
    throw size_cap_error(what + ": dimension " + std::to_string(dim) +
                         " exceeds the dense size cap " +
                         std::to_string(dense_dim_cap()) +
                         " (use the char-domain path, or raise MAGICFLOW_SIZE_CAP)");
  }
}

// Qudit dimensions are 2 or an odd prime.
inline bool is_valid_dimension(int d) {
  if (d < 2) return false;
  if (d == 2) return true;
  if (d % 2 == 0) return false;
  for (int f = 3; f * f <= d; f += 2) {
    if (d % f == 0) return false;
  }
  return true;
}

inline void require_valid_dimension(int d) {
  if (!is_valid_dimension(d)) {
    throw std::invalid_argument("qudit dimension must be 2 or an odd prime, got " +
                                std::to_string(d));
  }
}

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline int mod_d(long long v, int d) {
  const long long m = v % d;
  return static_cast<int>(m < 0 ? m + d : m);
}

// Multiplicative inverse mod a prime.
inline int inv_mod(int a, int d) {
  a = mod_d(a, d);
  if (a == 0) throw std::invalid_argument("no inverse of 0 mod " + std::to_string(d));
  int result = 1;
  int base = a;
  int e = d - 2;  // Fermat
  while (e > 0) {
    if (e & 1) result = mod_d(static_cast<long long>(result) * base, d);
    base = mod_d(static_cast<long long>(base) * base, d);
    e >>= 1;
  }
  return result;
}

// Deterministic seeded generator.  All randomness in the library flows
// through this type so that a seed fully determines every run; the double
// and integer derivations are spelled out rather than delegated to
// std::*_distribution, whose outputs are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, bound), unbiased by rejection.
  int uniform_int(int bound) {
    if (bound <= 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t span = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return static_cast<int>(v % span);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace magicflow
