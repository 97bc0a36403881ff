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

// Seeded state and subgroup builders used by the CLI and the test corpora.

#include <cstdint>
#include <vector>

#include "magicflow/clifford.hpp"
#include "magicflow/common.hpp"
#include "magicflow/operators.hpp"
#include "magicflow/phase_space.hpp"

namespace magicflow {

inline DensityOperator zeros_state(int n, int d) {
  Vector psi = Vector::Zero(ipow(d, n));
  psi(0) = 1.0;
  return DensityOperator::from_pure(n, d, psi);
}

// The single-qudit magic state: (|0⟩ + |1⟩)/√2 for odd d, and the π/8 state
// (|0⟩ + e^{iπ/4}|1⟩)/√2 for d = 2.
inline Vector magic_state_vector(int d) {
  require_valid_dimension(d);
  Vector psi = Vector::Zero(d);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(1) = (d == 2) ? std::polar(1.0 / std::sqrt(2.0), M_PI / 4.0)
                    : cxd(1.0 / std::sqrt(2.0), 0.0);
  return psi;
}

// k magic qudits next to n−k zero qudits, dressed by a seeded random
// Clifford circuit (depth 0 leaves the product state bare).
inline DensityOperator psi_k_state(int n, int d, int k, std::uint64_t seed, int depth = 24) {
  if (k < 0 || k > n) throw std::invalid_argument("psi_k_state: k must lie in [0, n]");
  const std::int64_t dim = ipow(d, n);
  check_dense_dim(dim, "psi_k_state");
  const Vector magic = magic_state_vector(d);
  Vector psi = Vector::Zero(dim);
  psi(0) = 1.0;
  for (int site = 0; site < k; ++site) {
    Vector next = Vector::Zero(dim);
    const std::int64_t stride = ipow(d, n - 1 - site);
    for (std::int64_t idx = 0; idx < dim; ++idx) {
      const int digit = static_cast<int>((idx / stride) % d);
      if (digit == 0 && psi(idx) != cxd(0.0, 0.0)) {
        for (int v = 0; v < d; ++v) next(idx + v * stride) += psi(idx) * magic(v);
      }
    }
    psi = std::move(next);
  }
  if (depth > 0) {
    const CliffordCircuit dressing = random_clifford(n, d, depth, seed);
    apply_to_vector(dressing, psi);
  }
  return DensityOperator::from_pure(n, d, psi);
}

// Haar-like random pure state: normalized complex Gaussian amplitudes.
inline DensityOperator random_pure_state(int n, int d, Rng& rng) {
  const std::int64_t dim = ipow(d, n);
  check_dense_dim(dim, "random_pure_state");
  Vector psi(dim);
  for (std::int64_t i = 0; i < dim; ++i) psi(i) = cxd(rng.normal(), rng.normal());
  psi /= psi.norm();
  return DensityOperator::from_pure(n, d, psi);
}

// Random full-support mixture of a few pure states.
inline DensityOperator random_density(int n, int d, Rng& rng, int components = 3) {
  const std::int64_t dim = ipow(d, n);
  check_dense_dim(dim, "random_density");
  Matrix m = Matrix::Zero(dim, dim);
  double total = 0.0;
  std::vector<double> weights(components);
  for (auto& w : weights) {
    w = rng.uniform() + 1e-3;
    total += w;
  }
  for (int c = 0; c < components; ++c) {
    m += (weights[c] / total) * random_pure_state(n, d, rng).matrix();
  }
  return DensityOperator(n, d, std::move(m));
}

inline DensityOperator random_stabilizer_state(int n, int d, Rng& rng, int depth = 24) {
  return prepare_stabilizer(random_clifford(n, d, depth, rng.next_u64()));
}

// Random isotropic subgroup of rank m with consistent generator phases:
// the canonical Z-type group with random d-th-root phases, conjugated by a
// random Clifford word.  Conjugation preserves isotropy, independence and
// the group-phase consistency, so the result is always a valid mean-state
// support.
inline IsotropicSubgroup random_isotropic_subgroup(int n, int d, int m, Rng& rng,
                                                   int depth = 24) {
  if (m < 0 || m > n) throw std::invalid_argument("subgroup rank must lie in [0, n]");
  const CliffordCircuit u = random_clifford(n, d, std::max(depth, 1), rng.next_u64());
  std::vector<PhasePoint> gens;
  std::vector<cxd> phases;
  const auto& roots = detail::unity_roots(d);
  for (int i = 0; i < m; ++i) {
    std::vector<int> p(n, 0), q(n, 0);
    p[i] = 1;
    auto [x, phase] = conjugate_phased_weyl(u, PhasePoint(d, p, q),
                                            roots[rng.uniform_int(d)]);
    gens.push_back(std::move(x));
    phases.push_back(phase);
  }
  return IsotropicSubgroup(n, d, std::move(gens), std::move(phases));
}

}  // namespace magicflow
