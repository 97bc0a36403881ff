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

// Exact arithmetic on the discrete phase space V^n = Z_d^n × Z_d^n.
//
// A phase point x = (p⃗, q⃗) labels the Weyl operator w(x); the symplectic
// product ⟨x,y⟩ = p_x·q_y − q_x·p_y (mod d) is the commutation pairing:
//
//     w(x) w(y) = ω_d^{⟨x,y⟩} w(y) w(x),   ω_d = e^{2πi/d}.
//
// The sign convention is validated against dense Weyl matrices in the test
// suite and frozen in docs/conventions.md.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "magicflow/common.hpp"

namespace magicflow {

struct PhasePoint {
  int d = 2;
  std::vector<int> p;  // Z-type exponents, one residue per site
  std::vector<int> q;  // X-type exponents

  PhasePoint() = default;

  PhasePoint(int d_, std::vector<int> p_, std::vector<int> q_)
      : d(d_), p(std::move(p_)), q(std::move(q_)) {
    require_valid_dimension(d);
    if (p.size() != q.size() || p.empty()) {
      throw std::invalid_argument("phase point needs matching, nonempty p and q");
    }
    for (auto& v : p) v = mod_d(v, d);
    for (auto& v : q) v = mod_d(v, d);
  }

  static PhasePoint zero(int n, int d) {
    return PhasePoint(d, std::vector<int>(n, 0), std::vector<int>(n, 0));
  }

  int sites() const { return static_cast<int>(p.size()); }

  bool is_zero() const {
    return std::all_of(p.begin(), p.end(), [](int v) { return v == 0; }) &&
           std::all_of(q.begin(), q.end(), [](int v) { return v == 0; });
  }

  PhasePoint operator+(const PhasePoint& o) const {
    check_compatible(o);
    PhasePoint r = *this;
    for (int i = 0; i < sites(); ++i) {
      r.p[i] = mod_d(r.p[i] + o.p[i], d);
      r.q[i] = mod_d(r.q[i] + o.q[i], d);
    }
    return r;
  }

  PhasePoint operator-() const {
    PhasePoint r = *this;
    for (auto& v : r.p) v = mod_d(-v, d);
    for (auto& v : r.q) v = mod_d(-v, d);
    return r;
  }

  // Scalar multiple c·x over Z_d.
  PhasePoint scaled(int c) const {
    PhasePoint r = *this;
    for (auto& v : r.p) v = mod_d(static_cast<long long>(v) * c, d);
    for (auto& v : r.q) v = mod_d(static_cast<long long>(v) * c, d);
    return r;
  }

  bool operator==(const PhasePoint& o) const {
    return d == o.d && p == o.p && q == o.q;
  }

  // Flat index in [0, d^2n): the p digits (site 0 most significant) followed
  // by the q digits.  This is the canonical table order for char functions.
  std::int64_t index() const {
    std::int64_t pi = 0, qi = 0;
    for (int i = 0; i < sites(); ++i) {
      pi = pi * d + p[i];
      qi = qi * d + q[i];
    }
    return pi * ipow(d, sites()) + qi;
  }

  static PhasePoint from_index(std::int64_t idx, int n, int d) {
    const std::int64_t dn = ipow(d, n);
    std::int64_t pi = idx / dn, qi = idx % dn;
    std::vector<int> p(n), q(n);
    for (int i = n - 1; i >= 0; --i) {
      p[i] = static_cast<int>(pi % d);
      pi /= d;
      q[i] = static_cast<int>(qi % d);
      qi /= d;
    }
    return PhasePoint(d, std::move(p), std::move(q));
  }

  void check_compatible(const PhasePoint& o) const {
    if (d != o.d || sites() != o.sites()) {
      throw std::invalid_argument("phase points live on different (n, d) systems");
    }
  }
};

// ⟨x,y⟩ = p_x·q_y − q_x·p_y mod d.  Bilinear, antisymmetric.
inline int symplectic_product(const PhasePoint& x, const PhasePoint& y) {
  x.check_compatible(y);
  long long acc = 0;
  for (int i = 0; i < x.sites(); ++i) {
    acc += static_cast<long long>(x.p[i]) * y.q[i] -
           static_cast<long long>(x.q[i]) * y.p[i];
  }
  return mod_d(acc, x.d);
}

inline bool is_isotropic(const std::vector<PhasePoint>& gens) {
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (symplectic_product(gens[i], gens[j]) != 0) return false;
    }
  }
  return true;
}

namespace detail {

// Row view of a phase point: 2n residues, p digits then q digits.
inline std::vector<int> point_row(const PhasePoint& x) {
  std::vector<int> row(x.p);
  row.insert(row.end(), x.q.begin(), x.q.end());
  return row;
}

inline PhasePoint row_point(const std::vector<int>& row, int n, int d) {
  std::vector<int> p(row.begin(), row.begin() + n);
  std::vector<int> q(row.begin() + n, row.end());
  return PhasePoint(d, std::move(p), std::move(q));
}

}  // namespace detail

// Minimal independent generating set of span(gens), by Gaussian elimination
// over Z_d.  Generators are processed in input order; each new pivot is the
// lowest-index nonzero component after reduction against earlier pivots.
inline std::vector<PhasePoint> symplectic_reduce(const std::vector<PhasePoint>& gens) {
  if (gens.empty()) return {};
  const int n = gens.front().sites();
  const int d = gens.front().d;
  std::vector<std::vector<int>> basis;  // rows with leading coefficient 1
  std::vector<int> pivot_col;
  for (const auto& g : gens) {
    gens.front().check_compatible(g);
    std::vector<int> row = detail::point_row(g);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const int c = row[pivot_col[b]];
      if (c != 0) {
        for (int j = 0; j < 2 * n; ++j) {
          row[j] = mod_d(row[j] - static_cast<long long>(c) * basis[b][j], d);
        }
      }
    }
    const auto nz = std::find_if(row.begin(), row.end(), [](int v) { return v != 0; });
    if (nz == row.end()) continue;  // dependent
    const int col = static_cast<int>(nz - row.begin());
    const int inv = inv_mod(row[col], d);
    for (auto& v : row) v = mod_d(static_cast<long long>(v) * inv, d);
    basis.push_back(std::move(row));
    pivot_col.push_back(col);
  }
  std::vector<PhasePoint> out;
  out.reserve(basis.size());
  for (const auto& row : basis) out.push_back(detail::row_point(row, n, d));
  return out;
}

// Additive closure of the generators.  Size is d^rank; the zero point is
// always a member.  Groups beyond ~4M points are refused — classification
// never needs them materialized.
inline std::vector<PhasePoint> span(const std::vector<PhasePoint>& gens, int n, int d) {
  require_valid_dimension(d);
  const std::vector<PhasePoint> basis = symplectic_reduce(gens);
  const int m = static_cast<int>(basis.size());
  const std::int64_t count = ipow(d, m);
  if (count > (std::int64_t{1} << 22)) {
    throw size_cap_error("span: group of size " + std::to_string(count) +
                         " is too large to materialize");
  }
  std::vector<PhasePoint> out;
  out.reserve(count);
  out.push_back(PhasePoint::zero(n, d));
  for (const auto& g : basis) {
    const std::size_t prev = out.size();
    PhasePoint step = g;
    for (int a = 1; a < d; ++a) {
      for (std::size_t i = 0; i < prev; ++i) out.push_back(out[i] + step);
      step = step + g;
    }
  }
  return out;
}

// A subgroup of V^n on which the symplectic form vanishes, together with a
// unit-modulus phase per generator.  This is the compact description of a
// mean state: the phased Weyl operators {phase_i · w(g_i)} generate an
// abelian group of commuting unitaries.
struct IsotropicSubgroup {
  int n = 1;
  int d = 2;
  std::vector<PhasePoint> generators;
  std::vector<cxd> phases;  // one per generator

  IsotropicSubgroup(int n_, int d_, std::vector<PhasePoint> gens, std::vector<cxd> phs)
      : n(n_), d(d_), generators(std::move(gens)), phases(std::move(phs)) {
    require_valid_dimension(d);
    if (generators.size() != phases.size()) {
      throw std::invalid_argument("isotropic subgroup: one phase per generator required");
    }
    for (const auto& g : generators) {
      if (g.d != d || g.sites() != n) {
        throw std::invalid_argument("isotropic subgroup: generator on wrong (n, d)");
      }
    }
    for (const auto& ph : phases) {
      if (std::abs(std::abs(ph) - 1.0) > tol::unit_modulus) {
        throw std::invalid_argument("isotropic subgroup: generator phase must be unit modulus");
      }
    }
    if (!is_isotropic(generators)) {
      throw std::invalid_argument("isotropic subgroup: generators fail isotropy");
    }
    if (symplectic_reduce(generators).size() != generators.size()) {
      throw std::invalid_argument("isotropic subgroup: generators are dependent");
    }
    if (rank() > n) {
      throw std::invalid_argument("isotropic subgroup: rank exceeds n");
    }
  }

  static IsotropicSubgroup trivial(int n, int d) { return IsotropicSubgroup(n, d, {}, {}); }

  int rank() const { return static_cast<int>(generators.size()); }
  std::int64_t size() const { return ipow(d, rank()); }
};

}  // namespace magicflow
