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

// The quantum convolution and its iteration.
//
// For odd prime d and parameters s² + t² ≡ 1 (mod d), the label-mixing
// permutation U_{s,t}|i⃗⟩|j⃗⟩ = |si⃗+tj⃗⟩|−ti⃗+sj⃗⟩ defines
//
//     ρ ⊠ σ = Tr_B[U_{s,t} (ρ ⊗ σ) U†_{s,t}],
//
// which multiplies characteristic functions pointwise on scaled labels:
// Ξ_{ρ⊠σ}(x) = Ξ_ρ(sx)·Ξ_σ(tx).  Qubits have no such (s,t); the
// three-input convolution ⊠₃ built from CNOTs replaces it, with the
// char-domain form Ξ_{⊠₃}(x) = (−1)^{p⃗·q⃗} Ξ₁(x)Ξ₂(x)Ξ₃(x) — established
// against the dense path once per process before the fast path is used.
//
// Iterating the self-convolution drives every |Ξ| < 1 to zero while the
// unit-modulus set is preserved, so the iteration converges (in magnitude)
// to the mean state; the per-step trace records that approach.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "magicflow/common.hpp"
#include "magicflow/operators.hpp"

namespace magicflow {

// No (s,t) with s²+t²≡1 and s,t ∉ {0,1} exists for this d; the message
// carries the arithmetic reason.
struct no_convolution_params : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvParams {
  int s = 0;
  int t = 0;
  int d = 0;

  ConvParams(int s_, int t_, int d_) : s(s_), t(t_), d(d_) {
    require_valid_dimension(d);
    if (d == 2) throw std::invalid_argument("two-input convolution parameters need odd d");
    s = mod_d(s, d);
    t = mod_d(t, d);
    if (mod_d(static_cast<long long>(s) * s + static_cast<long long>(t) * t, d) != 1) {
      throw std::invalid_argument("convolution parameters must satisfy s^2 + t^2 = 1 (mod d)");
    }
    if (s <= 1 || t <= 1) {
      throw std::invalid_argument("convolution parameters must have s, t outside {0, 1}");
    }
  }
};

// All nontrivial (s,t), ascending.  Throws no_convolution_params when the
// set is empty (d = 3 and d = 5).
inline std::vector<ConvParams> find_params(int d) {
  require_valid_dimension(d);
  if (d == 2) {
    throw std::invalid_argument("find_params: qubits use the three-input convolution");
  }
  std::vector<ConvParams> out;
  for (int s = 2; s < d; ++s) {
    for (int t = 2; t < d; ++t) {
      if (mod_d(static_cast<long long>(s) * s + static_cast<long long>(t) * t, d) == 1) {
        out.emplace_back(s, t, d);
      }
    }
  }
  if (out.empty()) {
    throw no_convolution_params(
        "no nontrivial parameters for this d: every solution of s^2 + t^2 = 1 (mod " +
        std::to_string(d) + ") has s or t in {0, 1}");
  }
  return out;
}

inline ConvParams default_params(int d) { return find_params(d).front(); }

namespace detail {

// Joint-basis label map of U_{s,t} and its inverse, on flat indices of the
// 2n-qudit computational basis.
inline std::int64_t conv_label(std::int64_t ia, std::int64_t ib, int n, int d, int s, int t) {
  std::array<int, kMaxSites> a{}, b{};
  decode_index(ia, n, d, a);
  decode_index(ib, n, d, b);
  std::array<int, kMaxSites> u{}, v{};
  for (int i = 0; i < n; ++i) {
    u[i] = mod_d(static_cast<long long>(s) * a[i] + static_cast<long long>(t) * b[i], d);
    v[i] = mod_d(-static_cast<long long>(t) * a[i] + static_cast<long long>(s) * b[i], d);
  }
  return encode_index(u, n, d) * ipow(d, n) + encode_index(v, n, d);
}

}  // namespace detail

// Dense permutation matrix of U_{s,t} on 2n qudits.
inline Matrix u_st(const ConvParams& params, int n) {
  const int d = params.d;
  const std::int64_t dn = ipow(d, n);
  const std::int64_t dim = dn * dn;
  check_dense_dim(dim, "u_st");
  Matrix u = Matrix::Zero(dim, dim);
  for (std::int64_t ia = 0; ia < dn; ++ia) {
    for (std::int64_t ib = 0; ib < dn; ++ib) {
      u(detail::conv_label(ia, ib, n, d, params.s, params.t), ia * dn + ib) = 1.0;
    }
  }
  return u;
}

// ρ ⊠ σ on the computational basis.  U_{s,t} is a permutation, so the
// conjugation and partial trace collapse to one index-mapped sum:
//   out[a,a'] = Σ_b ρ[sa−tb, sa'−tb] σ[ta+sb, ta'+sb].
inline DensityOperator convolve_dense(const DensityOperator& rho, const DensityOperator& sigma,
                                      const ConvParams& params) {
  if (rho.n() != sigma.n() || rho.d() != sigma.d()) {
    throw std::invalid_argument("convolve_dense: states live on different systems");
  }
  if (rho.d() != params.d) {
    throw std::invalid_argument("convolve_dense: parameter modulus does not match the states");
  }
  rho.validate();
  sigma.validate();
  const int n = rho.n();
  const int d = rho.d();
  const std::int64_t dn = rho.dim();
  check_dense_dim(dn * dn, "convolve_dense");
  const int s = params.s, t = params.t;

  Matrix out = Matrix::Zero(dn, dn);
  std::array<int, detail::kMaxSites> da{}, db{}, ra{};
  for (std::int64_t a = 0; a < dn; ++a) {
    detail::decode_index(a, n, d, da);
    for (std::int64_t a2 = 0; a2 < dn; ++a2) {
      detail::decode_index(a2, n, d, ra);
      cxd acc = 0.0;
      for (std::int64_t b = 0; b < dn; ++b) {
        detail::decode_index(b, n, d, db);
        std::array<int, detail::kMaxSites> i1{}, i2{}, j1{}, j2{};
        for (int k = 0; k < n; ++k) {
          i1[k] = mod_d(static_cast<long long>(s) * da[k] - static_cast<long long>(t) * db[k], d);
          i2[k] = mod_d(static_cast<long long>(s) * ra[k] - static_cast<long long>(t) * db[k], d);
          j1[k] = mod_d(static_cast<long long>(t) * da[k] + static_cast<long long>(s) * db[k], d);
          j2[k] = mod_d(static_cast<long long>(t) * ra[k] + static_cast<long long>(s) * db[k], d);
        }
        acc += rho.matrix()(detail::encode_index(i1, n, d), detail::encode_index(i2, n, d)) *
               sigma.matrix()(detail::encode_index(j1, n, d), detail::encode_index(j2, n, d));
      }
      out(a, a2) = acc;
    }
  }
  return DensityOperator(n, d, std::move(out));
}

// Ξ_{ρ⊠σ}(x) = Ξ_ρ(sx)·Ξ_σ(tx).
inline CharFunction convolve_char(const CharFunction& xr, const CharFunction& xs,
                                  const ConvParams& params) {
  if (xr.n() != xs.n() || xr.d() != xs.d()) {
    throw std::invalid_argument("convolve_char: tables live on different systems");
  }
  if (xr.d() != params.d) {
    throw std::invalid_argument("convolve_char: parameter modulus does not match the tables");
  }
  const std::int64_t size = xr.table_size();
  std::vector<cxd> out(size);
  for (std::int64_t idx = 0; idx < size; ++idx) {
    const PhasePoint x = xr.point(idx);
    out[idx] = xr[x.scaled(params.s).index()] * xs[x.scaled(params.t).index()];
  }
  return CharFunction(xr.n(), xr.d(), std::move(out));
}

// ---------------------------------------------------------------------------
// Qubit path: the three-input convolution.

namespace detail {

// Basis map of the key unitary: (x⃗, y⃗, z⃗) → (x+y+z, x+y, x+z) per site,
// which is the CNOT word (CNOT_{2→1} CNOT_{3→1})(CNOT_{1→2} CNOT_{1→3})
// applied within each (i, n+i, 2n+i) triple.
inline std::int64_t key_label(std::int64_t joint, int n) {
  const std::int64_t dn = std::int64_t{1} << n;
  std::int64_t x = joint / (dn * dn), y = (joint / dn) % dn, z = joint % dn;
  const std::int64_t x2 = x ^ y ^ z;
  const std::int64_t y2 = x ^ y;
  const std::int64_t z2 = x ^ z;
  return (x2 * dn + y2) * dn + z2;
}

}  // namespace detail

// Dense key unitary on 3n qubits.
inline Matrix key_unitary_qubit(int n) {
  if (n < 1) throw std::invalid_argument("key_unitary_qubit: n must be >= 1");
  const std::int64_t dim = std::int64_t{1} << (3 * n);
  check_dense_dim(dim, "key_unitary_qubit");
  Matrix v = Matrix::Zero(dim, dim);
  for (std::int64_t j = 0; j < dim; ++j) v(detail::key_label(j, n), j) = 1.0;
  return v;
}

// ⊠₃(ρ₁,ρ₂,ρ₃) = Tr_{2,3}[V (ρ₁⊗ρ₂⊗ρ₃) V†] for qubit systems.
inline DensityOperator convolve3_dense(const DensityOperator& r1, const DensityOperator& r2,
                                       const DensityOperator& r3) {
  if (r1.d() != 2 || r2.d() != 2 || r3.d() != 2) {
    throw std::invalid_argument("convolve3_dense: the three-input convolution is for qubits");
  }
  if (r1.n() != r2.n() || r1.n() != r3.n()) {
    throw std::invalid_argument("convolve3_dense: states live on different systems");
  }
  r1.validate();
  r2.validate();
  r3.validate();
  const int n = r1.n();
  const std::int64_t dn = r1.dim();
  check_dense_dim(dn * dn * dn, "convolve3_dense");

  // V is a permutation; its inverse basis map is
  // (u1,u2,u3) → (u1+u2+u3, u1+u3, u1+u2), so conjugation and the partial
  // trace collapse to one index-mapped sum.
  Matrix out = Matrix::Zero(dn, dn);
  for (std::int64_t a = 0; a < dn; ++a) {
    for (std::int64_t a2 = 0; a2 < dn; ++a2) {
      cxd acc = 0.0;
      for (std::int64_t b = 0; b < dn; ++b) {
        for (std::int64_t c = 0; c < dn; ++c) {
          const std::int64_t i1 = a ^ b ^ c, j1 = a ^ c, l1 = a ^ b;
          const std::int64_t i2 = a2 ^ b ^ c, j2 = a2 ^ c, l2 = a2 ^ b;
          acc += r1.matrix()(i1, i2) * r2.matrix()(j1, j2) * r3.matrix()(l1, l2);
        }
      }
      out(a, a2) = acc;
    }
  }
  return DensityOperator(n, 2, std::move(out));
}

namespace detail {

inline CharFunction convolve3_char_unchecked(const CharFunction& x1, const CharFunction& x2,
                                             const CharFunction& x3) {
  const std::int64_t size = x1.table_size();
  std::vector<cxd> out(size);
  for (std::int64_t idx = 0; idx < size; ++idx) {
    const PhasePoint x = x1.point(idx);
    int pq = 0;
    for (int i = 0; i < x.sites(); ++i) pq ^= (x.p[i] & x.q[i]);
    const double sign = pq ? -1.0 : 1.0;
    out[idx] = sign * x1[idx] * x2[idx] * x3[idx];
  }
  return CharFunction(x1.n(), x1.d(), std::move(out));
}

}  // namespace detail

struct QubitDualityReport {
  bool passed = false;
  double max_error = 0.0;
  int cases = 0;
};

// One-time equivalence check of the qubit char-domain formula against the
// dense path, over a seeded corpus at n = 1 and n = 2.  The fast path
// refuses to run unless this has passed in the current process.
inline const QubitDualityReport& qubit_duality_validation() {
  static const QubitDualityReport report = [] {
    QubitDualityReport r;
    Rng rng(0x9e3779b97f4a7c15ULL);
    for (int n = 1; n <= 2; ++n) {
      const std::int64_t dim = std::int64_t{1} << n;
      for (int rep = 0; rep < 12; ++rep) {
        std::array<DensityOperator, 3> rho = {DensityOperator::maximally_mixed(n, 2),
                                              DensityOperator::maximally_mixed(n, 2),
                                              DensityOperator::maximally_mixed(n, 2)};
        for (auto& state : rho) {
          Vector psi(dim);
          for (std::int64_t i = 0; i < dim; ++i) psi(i) = cxd(rng.normal(), rng.normal());
          psi /= psi.norm();
          state = DensityOperator::from_pure(n, 2, psi);
        }
        const CharFunction dense_path =
            char_function(convolve3_dense(rho[0], rho[1], rho[2]));
        const CharFunction fast_path = detail::convolve3_char_unchecked(
            char_function(rho[0]), char_function(rho[1]), char_function(rho[2]));
        for (std::int64_t i = 0; i < dense_path.table_size(); ++i) {
          r.max_error = std::max(r.max_error, std::abs(dense_path[i] - fast_path[i]));
        }
        ++r.cases;
      }
    }
    r.passed = r.max_error < tol::duality;
    return r;
  }();
  return report;
}

inline CharFunction convolve3_char(const CharFunction& x1, const CharFunction& x2,
                                   const CharFunction& x3) {
  if (x1.d() != 2 || x2.d() != 2 || x3.d() != 2) {
    throw std::invalid_argument("convolve3_char: the three-input convolution is for qubits");
  }
  if (x1.n() != x2.n() || x1.n() != x3.n()) {
    throw std::invalid_argument("convolve3_char: tables live on different systems");
  }
  const auto& gate = qubit_duality_validation();
  if (!gate.passed) {
    throw std::runtime_error(
        "convolve3_char: the dense/char equivalence check failed in this build (max error " +
        std::to_string(gate.max_error) + "); fast path disabled");
  }
  return detail::convolve3_char_unchecked(x1, x2, x3);
}

// ---------------------------------------------------------------------------
// Self-convolution and iteration.

// ⊠ρ: ρ ⊠_{s,t} ρ for odd d, ⊠₃(ρ,ρ,ρ) for qubits.
inline DensityOperator self_convolve(const DensityOperator& rho,
                                     const std::optional<ConvParams>& params = std::nullopt) {
  if (rho.d() == 2) return convolve3_dense(rho, rho, rho);
  const ConvParams p = params ? *params : default_params(rho.d());
  return convolve_dense(rho, rho, p);
}

struct FlowStep {
  int L = 0;
  double entropy = 0.0;
  double supnorm_gap = 0.0;          // sup over support of min(|Ξ|, 1−|Ξ|)
  double trace_dist_estimate = 0.0;  // distance to the thresholded table's state
};

struct FlowTrace {
  int n = 1;
  int d = 2;
  std::optional<ConvParams> params;  // empty on the qubit path
  std::vector<FlowStep> steps;
  bool stalled = false;  // the sub-unit sector stopped contracting
};

namespace detail {

inline double supnorm_gap(const CharFunction& xi) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < xi.table_size(); ++i) {
    const double mag = std::abs(xi[i]);
    if (mag <= tol::support_eps) continue;
    worst = std::max(worst, std::min(mag, 1.0 - mag));
  }
  return worst;
}

// Largest sub-unit magnitude on the support, or 0 if there is none.
inline double largest_subunit(const CharFunction& xi, double unit_tol) {
  double largest = 0.0;
  for (std::int64_t i = 0; i < xi.table_size(); ++i) {
    const double mag = std::abs(xi[i]);
    if (mag > tol::support_eps && mag < 1.0 - unit_tol) largest = std::max(largest, mag);
  }
  return largest;
}

// Mean-state estimate of a table: keep unit-modulus entries, zero the rest.
inline CharFunction threshold_table(const CharFunction& xi, double keep_above) {
  std::vector<cxd> out(xi.table_size(), cxd(0.0, 0.0));
  for (std::int64_t i = 0; i < xi.table_size(); ++i) {
    if (std::abs(xi[i]) >= keep_above) out[i] = xi[i];
  }
  return CharFunction(xi.n(), xi.d(), std::move(out));
}

}  // namespace detail

// One char-domain self-convolution pass.
inline CharFunction self_convolve_char(const CharFunction& xi,
                                       const std::optional<ConvParams>& params) {
  if (xi.d() == 2) return convolve3_char(xi, xi, xi);
  const ConvParams p = params ? *params : default_params(xi.d());
  return convolve_char(xi, xi, p);
}

// ⊠_L ρ with a per-iteration trace.  The state evolves in the char domain
// (pointwise products on scaled labels, exact in double precision); each
// step's entropy and distance telemetry reconstructs the dense iterate.
inline std::pair<DensityOperator, FlowTrace> iterate(const DensityOperator& rho,
                                                     const std::optional<ConvParams>& params,
                                                     int steps) {
  if (steps < 1) throw std::invalid_argument("iterate: L must be >= 1");
  rho.validate();
  FlowTrace trace;
  trace.n = rho.n();
  trace.d = rho.d();
  if (rho.d() != 2) trace.params = params ? *params : default_params(rho.d());

  CharFunction xi = char_function(rho);
  // The sup of the sub-unit magnitudes contracts strictly (each pass takes
  // products of sub-unit factors), so a run of non-contracting steps means
  // the input was not a genuine state table.
  double prev_sub = detail::largest_subunit(xi, tol::unit_modulus);
  int stall_run = 0;
  for (int L = 1; L <= steps; ++L) {
    xi = self_convolve_char(xi, trace.params);
    FlowStep step;
    step.L = L;
    step.supnorm_gap = detail::supnorm_gap(xi);
    const DensityOperator dense = inverse_char(xi);
    step.entropy = von_neumann_entropy(dense);
    const double sub_now = detail::largest_subunit(xi, tol::unit_modulus);
    const double keep = 1.0 - std::max(tol::unit_modulus, 0.5 * (1.0 - sub_now));
    step.trace_dist_estimate =
        trace_distance(dense, inverse_char(detail::threshold_table(xi, keep)));
    trace.steps.push_back(step);

    if (sub_now > tol::unit_modulus && sub_now > prev_sub * (1.0 - 1e-12)) {
      if (++stall_run >= 3) trace.stalled = true;
    } else {
      stall_run = 0;
    }
    prev_sub = sub_now;
  }
  return {inverse_char(xi), std::move(trace)};
}

}  // namespace magicflow
