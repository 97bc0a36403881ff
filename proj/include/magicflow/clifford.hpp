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

// Clifford circuits on n qudits as words over the generator gates
//
//   FOURIER  F|j⟩ = d^{-1/2} Σ_k ω^{jk}|k⟩          (Hadamard at d=2)
//   PHASE    P|j⟩ = ω^{j(j-1)/2}|j⟩ for odd d,       diag(1, i) at d=2
//   MULT(a)  |j⟩ → |aj⟩, a invertible mod d          (identity at d=2)
//   SUM      |x⟩_c|y⟩_t → |x⟩_c|y+x⟩_t               (CNOT at d=2)
//   WEYL     a single-site displacement w(p,q)
//
// A circuit is applied to kets in list order (gates[0] acts first).
//
// Conjugation of Weyl operators by a gate is precomputed as a lookup table
// from the gate's dense matrix at one or two sites: G w(x) G† = μ w(x'),
// identified numerically and cached per (kind, parameter, d).  This keeps
// every phase exact without a hand-derived phase calculus per gate.

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "magicflow/common.hpp"
#include "magicflow/operators.hpp"
#include "magicflow/phase_space.hpp"

namespace magicflow {

enum class GateKind { Fourier, Phase, Mult, Sum, Weyl };

struct Gate {
  GateKind kind = GateKind::Fourier;
  int site = 0;     // Fourier / Phase / Mult / Weyl
  int control = 0;  // Sum
  int target = 0;   // Sum
  int a = 1;        // Mult parameter
  int wp = 0;       // Weyl labels
  int wq = 0;

  static Gate fourier(int site) { return {GateKind::Fourier, site}; }
  static Gate phase(int site) { return {GateKind::Phase, site}; }
  static Gate mult(int site, int a) {
    Gate g{GateKind::Mult, site};
    g.a = a;
    return g;
  }
  static Gate sum(int control, int target) {
    Gate g{GateKind::Sum};
    g.control = control;
    g.target = target;
    return g;
  }
  static Gate weyl(int site, int p, int q) {
    Gate g{GateKind::Weyl, site};
    g.wp = p;
    g.wq = q;
    return g;
  }
};

struct CliffordCircuit {
  int n = 1;
  int d = 2;
  std::vector<Gate> gates;

  CliffordCircuit(int n_, int d_, std::vector<Gate> gates_ = {})
      : n(n_), d(d_), gates(std::move(gates_)) {
    require_valid_dimension(d);
    if (n < 1) throw std::invalid_argument("circuit needs at least one site");
    for (const auto& g : gates) validate_gate(g);
  }

  void append(const Gate& g) {
    validate_gate(g);
    gates.push_back(g);
  }

  void validate_gate(const Gate& g) const {
    switch (g.kind) {
      case GateKind::Sum:
        if (g.control < 0 || g.control >= n || g.target < 0 || g.target >= n ||
            g.control == g.target) {
          throw std::invalid_argument("SUM gate has invalid control/target");
        }
        break;
      case GateKind::Mult:
        if (mod_d(g.a, d) == 0) {
          throw std::invalid_argument("MULT parameter must be invertible mod d");
        }
        [[fallthrough]];
      default:
        if (g.site < 0 || g.site >= n) {
          throw std::invalid_argument("gate site out of range");
        }
    }
  }
};

// Canonical local matrices of the generator gates.
inline Matrix gate_matrix(GateKind kind, int d, int a = 1) {
  require_valid_dimension(d);
  switch (kind) {
    case GateKind::Fourier: {
      Matrix f(d, d);
      const auto& roots = detail::unity_roots(d == 2 ? 4 : d);
      const int step = d == 2 ? 2 : 1;  // ω_2 = −1 = i^2
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          f(k, j) = roots[mod_d(static_cast<long long>(step) * j * k, d == 2 ? 4 : d)];
        }
      }
      return f / std::sqrt(static_cast<double>(d));
    }
    case GateKind::Phase: {
      Matrix p = Matrix::Zero(d, d);
      if (d == 2) {
        p(0, 0) = 1.0;
        p(1, 1) = cxd(0.0, 1.0);
      } else {
        const auto& roots = detail::unity_roots(d);
        for (int j = 0; j < d; ++j) {
          p(j, j) = roots[mod_d(static_cast<long long>(j) * (j - 1) / 2, d)];
        }
      }
      return p;
    }
    case GateKind::Mult: {
      if (mod_d(a, d) == 0) {
        throw std::invalid_argument("MULT parameter must be invertible mod d");
      }
      Matrix m = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) m(mod_d(static_cast<long long>(a) * k, d), k) = 1.0;
      return m;
    }
    case GateKind::Sum: {
      // |x⟩|y⟩ → |x+y⟩|y⟩: the addend is the second register.
      Matrix s = Matrix::Zero(d * d, d * d);
      for (int x = 0; x < d; ++x) {
        for (int y = 0; y < d; ++y) {
          s(mod_d(x + y, d) * d + y, x * d + y) = 1.0;
        }
      }
      return s;
    }
    case GateKind::Weyl:
      throw std::invalid_argument("WEYL gates carry labels; use weyl_matrix");
  }
  throw std::logic_error("unreachable");
}

namespace detail {

// In-place action of one gate on a state vector.
inline void apply_gate_to_vector(const Gate& g, int n, int d, Vector& psi) {
  const std::int64_t dim = psi.size();
  const auto stride_of = [&](int site) { return ipow(d, n - 1 - site); };
  switch (g.kind) {
    case GateKind::Fourier: {
      const Matrix f = gate_matrix(GateKind::Fourier, d);
      const std::int64_t stride = stride_of(g.site);
      std::vector<cxd> slot(d);
      for (std::int64_t block = 0; block < dim; block += stride * d) {
        for (std::int64_t off = 0; off < stride; ++off) {
          const std::int64_t base = block + off;
          for (int j = 0; j < d; ++j) slot[j] = psi(base + j * stride);
          for (int k = 0; k < d; ++k) {
            cxd acc = 0.0;
            for (int j = 0; j < d; ++j) acc += f(k, j) * slot[j];
            psi(base + k * stride) = acc;
          }
        }
      }
      return;
    }
    case GateKind::Phase: {
      const Matrix p = gate_matrix(GateKind::Phase, d);
      const std::int64_t stride = stride_of(g.site);
      for (std::int64_t idx = 0; idx < dim; ++idx) {
        const int k = static_cast<int>((idx / stride) % d);
        psi(idx) *= p(k, k);
      }
      return;
    }
    case GateKind::Mult: {
      const std::int64_t stride = stride_of(g.site);
      const int ainv = inv_mod(g.a, d);
      Vector out(dim);
      for (std::int64_t idx = 0; idx < dim; ++idx) {
        const int k = static_cast<int>((idx / stride) % d);
        const int src = mod_d(static_cast<long long>(ainv) * k, d);
        out(idx) = psi(idx + (src - k) * stride);
      }
      psi = std::move(out);
      return;
    }
    case GateKind::Sum: {
      const std::int64_t sc = stride_of(g.control);
      const std::int64_t st = stride_of(g.target);
      Vector out(dim);
      for (std::int64_t idx = 0; idx < dim; ++idx) {
        const int kc = static_cast<int>((idx / sc) % d);
        const int kt = static_cast<int>((idx / st) % d);
        const int src_t = mod_d(kt - kc, d);
        out(idx) = psi(idx + (src_t - kt) * st);
      }
      psi = std::move(out);
      return;
    }
    case GateKind::Weyl: {
      const std::int64_t stride = stride_of(g.site);
      const int order = d == 2 ? 4 : d;
      const auto& roots = unity_roots(order);
      const int halfinv = d == 2 ? 0 : (d + 1) / 2;
      Vector out(dim);
      for (std::int64_t idx = 0; idx < dim; ++idx) {
        const int k = static_cast<int>((idx / stride) % d);  // output digit
        const int src = mod_d(k - g.wq, d);
        long long expo;
        if (d == 2) {
          expo = -static_cast<long long>(g.wp) * g.wq + 2LL * g.wp * k;
        } else {
          expo = static_cast<long long>(halfinv) * (-static_cast<long long>(g.wp) * g.wq) +
                 static_cast<long long>(g.wp) * k;
        }
        out(idx) = roots[mod_d(expo, order)] * psi(idx + (src - k) * stride);
      }
      psi = std::move(out);
      return;
    }
  }
}

}  // namespace detail

inline void apply_to_vector(const CliffordCircuit& c, Vector& psi) {
  if (psi.size() != ipow(c.d, c.n)) {
    throw std::invalid_argument("vector dimension does not match circuit (n, d)");
  }
  for (const auto& g : c.gates) detail::apply_gate_to_vector(g, c.n, c.d, psi);
}

// Dense unitary of the whole circuit (gates[0] rightmost).
inline Matrix circuit_unitary(const CliffordCircuit& c) {
  const std::int64_t dim = ipow(c.d, c.n);
  check_dense_dim(dim, "circuit_unitary");
  Matrix u = Matrix::Identity(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    Vector v = u.col(col);
    for (const auto& g : c.gates) detail::apply_gate_to_vector(g, c.n, c.d, v);
    u.col(col) = v;
  }
  return u;
}

// U ρ U†.
inline DensityOperator apply(const CliffordCircuit& c, const DensityOperator& rho) {
  if (rho.n() != c.n || rho.d() != c.d) {
    throw std::invalid_argument("apply: circuit and state live on different systems");
  }
  const Matrix u = circuit_unitary(c);
  return DensityOperator(rho.n(), rho.d(), u * rho.matrix() * u.adjoint());
}

// U_C |0⟩^{⊗n} as a density operator.
inline DensityOperator prepare_stabilizer(const CliffordCircuit& c) {
  Vector psi = Vector::Zero(ipow(c.d, c.n));
  psi(0) = 1.0;
  apply_to_vector(c, psi);
  return DensityOperator::from_pure(c.n, c.d, psi);
}

// True iff U maps every Weyl operator to a unit scalar times a Weyl
// operator.  Checking the 2n generator labels suffices; conjugation is a
// homomorphism and Weyl products are scalar times Weyl.
inline bool is_clifford(const Matrix& u, int n, int d, double match_tol = tol::clifford_match) {
  const std::int64_t dim = ipow(d, n);
  if (u.rows() != dim || u.cols() != dim) {
    throw std::invalid_argument("is_clifford: matrix dimension mismatch");
  }
  if ((u.adjoint() * u - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol::unitary) {
    throw std::invalid_argument("is_clifford: input is not unitary");
  }
  const double dn = static_cast<double>(dim);
  for (int site = 0; site < n; ++site) {
    for (int which = 0; which < 2; ++which) {
      std::vector<int> p(n, 0), q(n, 0);
      (which == 0 ? p : q)[site] = 1;
      const Matrix conj = u * weyl_matrix(PhasePoint(d, p, q)) * u.adjoint();
      const CharFunction coeffs = weyl_transform(conj, n, d);
      double best = 0.0, second = 0.0;
      for (std::int64_t i = 0; i < coeffs.table_size(); ++i) {
        const double mag = std::abs(coeffs[i]) / dn;
        if (mag > best) {
          second = best;
          best = mag;
        } else if (mag > second) {
          second = mag;
        }
      }
      if (std::abs(best - 1.0) > match_tol || second > match_tol) return false;
    }
  }
  return true;
}

// Seeded random circuit word over the generator gates.
inline CliffordCircuit random_clifford(int n, int d, int depth, std::uint64_t seed) {
  require_valid_dimension(d);
  if (depth < 1) throw std::invalid_argument("random_clifford: depth must be >= 1");
  Rng rng(seed);
  CliffordCircuit c(n, d);
  for (int step = 0; step < depth; ++step) {
    const int menu = (n > 1 ? 4 : 3) + (d > 2 ? 1 : 0);
    const int pick = rng.uniform_int(menu);
    const int site = rng.uniform_int(n);
    switch (pick) {
      case 0:
        c.append(Gate::fourier(site));
        break;
      case 1:
        c.append(Gate::phase(site));
        break;
      case 2: {
        int p = rng.uniform_int(d), q = rng.uniform_int(d);
        if (p == 0 && q == 0) p = 1;
        c.append(Gate::weyl(site, p, q));
        break;
      }
      case 3:
        if (n > 1) {
          int t = rng.uniform_int(n - 1);
          if (t >= site) ++t;
          c.append(Gate::sum(site, t));
        } else {
          c.append(Gate::mult(site, 2 + rng.uniform_int(d - 2)));
        }
        break;
      case 4:
        c.append(Gate::mult(site, 2 + rng.uniform_int(d - 2)));
        break;
    }
  }
  return c;
}

namespace detail {

// Cached conjugation table of one gate: local Weyl label → (label', μ).
struct ConjTable {
  int sites = 1;  // 1 or 2
  std::vector<std::int64_t> label;
  std::vector<cxd> mu;
};

// Recover (x', μ) from C = μ·w(x') on `sites` local sites.
inline std::pair<PhasePoint, cxd> identify_scalar_weyl(const Matrix& c, int sites, int d) {
  const std::int64_t dim = ipow(d, sites);
  std::int64_t r0 = -1;
  double best = 0.0;
  for (std::int64_t r = 0; r < dim; ++r) {
    if (std::abs(c(r, 0)) > best) {
      best = std::abs(c(r, 0));
      r0 = r;
    }
  }
  if (best < 0.5) throw std::logic_error("scalar-weyl identification: no dominant entry");
  std::array<int, kMaxSites> qd{};
  decode_index(r0, sites, d, qd);
  std::vector<int> qv(qd.begin(), qd.begin() + sites);
  std::vector<int> pv(sites, 0);
  const cxd amp0 = c(r0, 0);
  for (int j = 0; j < sites; ++j) {
    const std::int64_t ej = ipow(d, sites - 1 - j);
    std::array<int, kMaxSites> digits{};
    decode_index(ej, sites, d, digits);
    for (int i = 0; i < sites; ++i) digits[i] = mod_d(digits[i] + qv[i], d);
    const cxd ampj = c(encode_index(digits, sites, d), ej);
    const double ang = std::arg(ampj / amp0);
    pv[j] = mod_d(static_cast<long long>(std::llround(ang * d / (2.0 * M_PI))), d);
  }
  const PhasePoint xp(d, pv, qv);
  const Matrix w = weyl_matrix(xp);
  const cxd mu = amp0 / w(r0, 0);
  if ((c - mu * w).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::logic_error("scalar-weyl identification failed; gate is not Clifford");
  }
  return {xp, mu};
}

inline const ConjTable& conj_table(GateKind kind, int d, int a) {
  static std::map<std::tuple<int, int, int>, ConjTable> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(static_cast<int>(kind), d, a);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  ConjTable table;
  table.sites = (kind == GateKind::Sum) ? 2 : 1;
  const int sites = table.sites;
  const std::int64_t labels = ipow(d, 2 * sites);
  table.label.resize(labels);
  table.mu.resize(labels);

  std::optional<Matrix> g_dense;
  if (kind == GateKind::Fourier || kind == GateKind::Phase) {
    g_dense = gate_matrix(kind, d);
  }
  // permutation form for MULT and SUM
  std::vector<std::int64_t> perm;
  if (kind == GateKind::Mult) {
    perm.resize(d);
    for (int k = 0; k < d; ++k) perm[k] = mod_d(static_cast<long long>(a) * k, d);
  } else if (kind == GateKind::Sum) {
    perm.resize(d * d);  // control-first layout: (x, y) → (x, y+x)
    for (int x = 0; x < d; ++x) {
      for (int y = 0; y < d; ++y) perm[x * d + y] = x * d + mod_d(y + x, d);
    }
  }

  for (std::int64_t l = 0; l < labels; ++l) {
    const PhasePoint x = PhasePoint::from_index(l, sites, d);
    const Matrix w = weyl_matrix(x);
    Matrix c;
    if (g_dense) {
      c = (*g_dense) * w * g_dense->adjoint();
    } else {
      const std::int64_t dim = ipow(d, sites);
      c = Matrix::Zero(dim, dim);
      for (std::int64_t row = 0; row < dim; ++row) {
        for (std::int64_t col = 0; col < dim; ++col) {
          if (w(row, col) != cxd(0.0, 0.0)) c(perm[row], perm[col]) = w(row, col);
        }
      }
    }
    const auto [xp, mu] = identify_scalar_weyl(c, sites, d);
    table.label[l] = xp.index();
    table.mu[l] = mu;
  }
  return cache.emplace(key, std::move(table)).first->second;
}

// Conjugate the phased Weyl (phase, x) by one gate: G (phase·w(x)) G†.
inline void conjugate_by_gate(const Gate& g, int d, PhasePoint& x, cxd& phase) {
  switch (g.kind) {
    case GateKind::Weyl: {
      // w(y) w(x) w(y)† = ω^{⟨y,x⟩} w(x), per site of y
      const int e = mod_d(static_cast<long long>(g.wp) * x.q[g.site] -
                              static_cast<long long>(g.wq) * x.p[g.site],
                          d);
      phase *= unity_roots(d)[e];
      return;
    }
    case GateKind::Sum: {
      const auto& table = conj_table(GateKind::Sum, d, 0);
      const std::int64_t l =
          (static_cast<std::int64_t>(x.p[g.control]) * d + x.p[g.target]) * d * d +
          (static_cast<std::int64_t>(x.q[g.control]) * d + x.q[g.target]);
      const PhasePoint loc = PhasePoint::from_index(table.label[l], 2, d);
      x.p[g.control] = loc.p[0];
      x.p[g.target] = loc.p[1];
      x.q[g.control] = loc.q[0];
      x.q[g.target] = loc.q[1];
      phase *= table.mu[l];
      return;
    }
    default: {
      const auto& table = conj_table(g.kind, d, g.kind == GateKind::Mult ? g.a : 0);
      const std::int64_t l = static_cast<std::int64_t>(x.p[g.site]) * d + x.q[g.site];
      const PhasePoint loc = PhasePoint::from_index(table.label[l], 1, d);
      x.p[g.site] = loc.p[0];
      x.q[g.site] = loc.q[0];
      phase *= table.mu[l];
      return;
    }
  }
}

}  // namespace detail

// (phase, x) → U (phase·w(x)) U† for the whole circuit.
inline std::pair<PhasePoint, cxd> conjugate_phased_weyl(const CliffordCircuit& c,
                                                        const PhasePoint& x, cxd phase) {
  PhasePoint cur = x;
  for (const auto& g : c.gates) detail::conjugate_by_gate(g, c.d, cur, phase);
  return {cur, phase};
}

namespace detail {

struct PhasedPoint {
  PhasePoint x;
  cxd phase;
};

inline PhasedPoint phased_mul(const PhasedPoint& a, const PhasedPoint& b) {
  return {a.x + b.x, a.phase * b.phase * weyl_product_phase(a.x, b.x)};
}

}  // namespace detail

// Clifford circuit U with U (phase_i · w(g_i)) U† = Z_i exactly, for the
// given isotropic subgroup's generators.  Conjugating the group's mean
// state by U therefore yields |0⟩⟨0|^{⊗m} ⊗ (I/d)^{⊗(n−m)}.
//
// Construction: symplectic Gaussian elimination realized by gates — each
// pivot is made Z-type (PHASE then FOURIER), normalized (MULT), moved to
// its home site (SUM-built swap), and spread-out support is folded in with
// SUM gates; a final layer of WEYL gates fixes the eigenphases to +1.
inline CliffordCircuit canonicalize(const IsotropicSubgroup& group) {
  const int n = group.n;
  const int d = group.d;
  const int m = group.rank();
  CliffordCircuit circuit(n, d);

  std::vector<detail::PhasedPoint> work;     // row-reduced working basis
  std::vector<detail::PhasedPoint> images;   // the original generators, conjugated along
  work.reserve(m);
  for (int i = 0; i < m; ++i) work.push_back({group.generators[i], group.phases[i]});
  images = work;

  const auto emit = [&](const Gate& g) {
    circuit.append(g);
    for (auto& w : work) detail::conjugate_by_gate(g, d, w.x, w.phase);
    for (auto& w : images) detail::conjugate_by_gate(g, d, w.x, w.phase);
  };

  // Make the pivot site of generator gi Z-type: (p, q≠0) → (p', 0), p' ≠ 0.
  const auto make_z_type = [&](int gi, int site) {
    for (int tries = 0; work[gi].x.q[site] != 0 && tries <= d; ++tries) {
      if (work[gi].x.p[site] == 0) {
        emit(Gate::fourier(site));  // (0, q) → (q, 0)
      } else {
        emit(Gate::phase(site));  // (p, q) → (p + q, q)
      }
    }
    if (work[gi].x.q[site] != 0) throw std::logic_error("canonicalize: pivot reduction stalled");
  };

  const auto swap_sites = [&](int s1, int s2) {
    for (int r = 0; r < d - 1; ++r) emit(Gate::sum(s1, s2));
    emit(Gate::sum(s2, s1));
    for (int r = 0; r < d - 1; ++r) emit(Gate::sum(s1, s2));
    if (d > 2) emit(Gate::mult(s2, d - 1));
  };

  for (int i = 0; i < m; ++i) {
    // Fold out components on already-finalized sites (commutation with the
    // finished Z_j forces q_j = 0 there; the p_j are cleared by replacing
    // the generator with a product — a row operation, not a gate).
    for (int j = 0; j < i; ++j) {
      while (work[i].x.p[j] != 0) {
        work[i] = detail::phased_mul(work[i], work[j]);
      }
      if (work[i].x.q[j] != 0) throw std::logic_error("canonicalize: lost commutation");
    }
    int pivot = -1;
    for (int j = i; j < n && pivot < 0; ++j) {
      if (work[i].x.p[j] != 0 || work[i].x.q[j] != 0) pivot = j;
    }
    if (pivot < 0) throw std::invalid_argument("canonicalize: generators are dependent");
    make_z_type(i, pivot);
    if (pivot != i) swap_sites(pivot, i);
    if (work[i].x.p[i] != 1) emit(Gate::mult(i, work[i].x.p[i]));
    if (work[i].x.p[i] != 1 || work[i].x.q[i] != 0) {
      throw std::logic_error("canonicalize: pivot normalization failed");
    }
    for (int j = i + 1; j < n; ++j) {
      if (work[i].x.q[j] != 0) make_z_type(i, j);
      for (int tries = 0; work[i].x.p[j] != 0 && tries <= d; ++tries) {
        emit(Gate::sum(j, i));
      }
      if (work[i].x.p[j] != 0 || work[i].x.q[j] != 0) {
        throw std::logic_error("canonicalize: clearing site failed");
      }
    }
  }

  // Eigenphase correction: each residual phase must be a d-th root of
  // unity for a genuine isotropic group; rotate it to +1 with a WEYL gate.
  const auto& roots = detail::unity_roots(d);
  for (int i = 0; i < m; ++i) {
    const double ang = std::arg(work[i].phase);
    const int j = mod_d(static_cast<long long>(std::llround(ang * d / (2.0 * M_PI))), d);
    if (std::abs(work[i].phase - roots[j]) > 1e-7) {
      throw std::invalid_argument("canonicalize: generator phase is not a d-th root of unity");
    }
    if (j != 0) emit(Gate::weyl(i, 0, j));
  }

  // The row operations above changed the generating set, so the original
  // generators now sit at Z-monomials Z^{v_i} with phase 1.  Column-reduce
  // the matrix {v_i} back to the identity with SUM/MULT gates; those leave
  // |0…0⟩ and the traced sites alone, so the canonical form is unchanged.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (images[i].x.q[j] != 0 || (j >= m && images[i].x.p[j] != 0)) {
        throw std::logic_error("canonicalize: conjugated generator left the Z block");
      }
    }
    int pivot = -1;
    for (int j = i; j < m && pivot < 0; ++j) {
      if (images[i].x.p[j] != 0) pivot = j;
    }
    if (pivot < 0) throw std::logic_error("canonicalize: image matrix is singular");
    if (pivot != i) swap_sites(pivot, i);
    if (images[i].x.p[i] != 1) emit(Gate::mult(i, images[i].x.p[i]));
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int tries = 0; images[i].x.p[j] != 0 && tries <= d; ++tries) {
        emit(Gate::sum(j, i));
      }
      if (images[i].x.p[j] != 0) throw std::logic_error("canonicalize: column clearing failed");
    }
  }

  for (int i = 0; i < m; ++i) {
    std::vector<int> p(n, 0), q(n, 0);
    p[i] = 1;
    if (!(images[i].x == PhasePoint(d, p, q)) ||
        std::abs(images[i].phase - cxd(1.0, 0.0)) > 1e-8) {
      throw std::logic_error("canonicalize: postcondition failed");
    }
  }
  return circuit;
}

}  // namespace magicflow
