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

// Dense states and Weyl operators, and the transform between the
// computational-basis representation and the characteristic function.
//
// Single-site Weyl operator, with X|k⟩ = |k+1⟩ and Z|k⟩ = ω_d^k |k⟩:
//
//     w(p,q) = ξ^{−pq} Z^p X^q,   ξ = i (d=2),  ξ = ω_d^{(d+1)/2} (odd d),
//
// extended to n sites by tensor product.  The d^{2n} Weyl operators form an
// orthogonal operator basis, so any state expands as
//
//     ρ = d^{−n} Σ_x Ξ_ρ(x) w(x),   Ξ_ρ(x) = Tr[ρ w(−x)].
//
// Every w(x) is a generalized permutation (one nonzero per column), which
// the transforms below exploit: a full char table costs O(d^{3n}) instead
// of O(d^{4n}).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "magicflow/common.hpp"
#include "magicflow/phase_space.hpp"

namespace magicflow {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {

constexpr int kMaxSites = 16;

inline void decode_index(std::int64_t idx, int n, int d, std::array<int, kMaxSites>& out) {
  for (int i = n - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % d);
    idx /= d;
  }
}

inline std::int64_t encode_index(const std::array<int, kMaxSites>& digits, int n, int d) {
  std::int64_t idx = 0;
  for (int i = 0; i < n; ++i) idx = idx * d + digits[i];
  return idx;
}

// d-th (odd d) or 4th (d=2) roots of unity; all Weyl phases live here.
// One table per order, with stable addresses: callers may hold the
// reference across calls for other orders.
inline const std::vector<cxd>& unity_roots(int order) {
  thread_local std::map<int, std::vector<cxd>> cache;
  auto [it, inserted] = cache.try_emplace(order);
  if (inserted) {
    it->second.resize(order);
    for (int k = 0; k < order; ++k) {
      it->second[k] = std::polar(1.0, 2.0 * M_PI * k / order);
    }
  }
  return it->second;
}

// Action of w(x) on basis states: w(x)|k⟩ = amp[k] |perm[k]⟩.
struct WeylAction {
  std::vector<std::int64_t> perm;
  std::vector<cxd> amp;
};

inline WeylAction weyl_action(const PhasePoint& x) {
  const int n = x.sites();
  const int d = x.d;
  const std::int64_t dim = ipow(d, n);
  const int order = (d == 2) ? 4 : d;
  const auto& roots = unity_roots(order);
  const int halfinv = (d == 2) ? 0 : (d + 1) / 2;  // 2^{-1} mod d for odd d

  WeylAction act;
  act.perm.resize(dim);
  act.amp.resize(dim);
  std::array<int, kMaxSites> k{};
  std::array<int, kMaxSites> kq{};
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    decode_index(idx, n, d, k);
    long long expo = 0;
    for (int i = 0; i < n; ++i) {
      kq[i] = mod_d(k[i] + x.q[i], d);
      if (d == 2) {
        // i^{−pq} · (−1)^{p(k+q)} tracked as a power of i
        expo += -static_cast<long long>(x.p[i]) * x.q[i] +
                2LL * x.p[i] * (k[i] + x.q[i]);
      } else {
        // ω^{−pq·2^{-1}} · ω^{p(k+q)}
        expo += static_cast<long long>(halfinv) * (-static_cast<long long>(x.p[i]) * x.q[i]) +
                static_cast<long long>(x.p[i]) * (k[i] + x.q[i]);
      }
    }
    act.perm[idx] = encode_index(kq, n, d);
    act.amp[idx] = roots[mod_d(expo, order)];
  }
  return act;
}

}  // namespace detail

// Dense Weyl matrix w(x) of dimension d^n.
inline Matrix weyl_matrix(const PhasePoint& x) {
  const std::int64_t dim = ipow(x.d, x.sites());
  check_dense_dim(dim, "weyl_matrix");
  const auto act = detail::weyl_action(x);
  Matrix w = Matrix::Zero(dim, dim);
  for (std::int64_t k = 0; k < dim; ++k) w(act.perm[k], k) = act.amp[k];
  return w;
}

// Scalar φ(x,y) with w(x)·w(y) = φ(x,y)·w(x+y), computed exactly from
// integer exponent arithmetic.  For odd d this is ξ^{⟨x,y⟩}; for d=2 the
// mod-4 bookkeeping of the label reduction matters.
inline cxd weyl_product_phase(const PhasePoint& x, const PhasePoint& y) {
  x.check_compatible(y);
  const int d = x.d;
  const int order = (d == 2) ? 4 : d;
  const auto& roots = detail::unity_roots(order);
  long long expo = 0;
  if (d == 2) {
    for (int i = 0; i < x.sites(); ++i) {
      const int ps = (x.p[i] + y.p[i]) & 1;
      const int qs = (x.q[i] + y.q[i]) & 1;
      expo += ps * qs - x.p[i] * x.q[i] - y.p[i] * y.q[i] -
              2LL * x.q[i] * y.p[i];
    }
  } else {
    const int halfinv = (d + 1) / 2;
    for (int i = 0; i < x.sites(); ++i) {
      expo += static_cast<long long>(halfinv) *
              (static_cast<long long>(x.p[i]) * y.q[i] -
               static_cast<long long>(y.p[i]) * x.q[i]);
    }
  }
  return roots[mod_d(expo, order)];
}

// The full characteristic table Ξ: V^n → C of a state (or of any operator),
// indexed by PhasePoint::index().
class CharFunction {
 public:
  CharFunction(int n, int d, std::vector<cxd> values)
      : n_(n), d_(d), values_(std::move(values)) {
    require_valid_dimension(d);
    if (static_cast<std::int64_t>(values_.size()) != ipow(d, 2 * n)) {
      throw std::invalid_argument("char table has wrong size for (n, d)");
    }
  }

  int n() const { return n_; }
  int d() const { return d_; }
  std::int64_t table_size() const { return static_cast<std::int64_t>(values_.size()); }

  cxd operator[](std::int64_t idx) const { return values_[idx]; }
  cxd& operator[](std::int64_t idx) { return values_[idx]; }
  cxd at(const PhasePoint& x) const { return values_[x.index()]; }

  const std::vector<cxd>& values() const { return values_; }
  std::vector<cxd>& values() { return values_; }

  PhasePoint point(std::int64_t idx) const { return PhasePoint::from_index(idx, n_, d_); }

  // State-table invariants: Ξ(0) = 1, |Ξ| ≤ 1, Ξ(−x) = conj(Ξ(x)).
  void validate() const {
    if (std::abs(values_[0] - cxd(1.0, 0.0)) > tol::trace_one) {
      throw std::invalid_argument("char table: value at the zero point must be 1");
    }
    for (std::int64_t i = 0; i < table_size(); ++i) {
      if (std::abs(values_[i]) > 1.0 + tol::round_trip) {
        throw std::invalid_argument("char table: |value| exceeds 1");
      }
      const std::int64_t neg = (-point(i)).index();
      if (std::abs(values_[neg] - std::conj(values_[i])) > 1e-8) {
        throw std::invalid_argument("char table: conjugate symmetry violated");
      }
    }
  }

 private:
  int n_;
  int d_;
  std::vector<cxd> values_;
};

// Dense d^n × d^n density matrix.  Hermiticity and unit trace are enforced
// at construction; positivity is checked by validate(), which the
// state-consuming operations call once and cache.
class DensityOperator {
 public:
  DensityOperator(int n, int d, Matrix m) : n_(n), d_(d), mat_(std::move(m)) {
    require_valid_dimension(d);
    const std::int64_t dim = ipow(d, n);
    check_dense_dim(dim, "DensityOperator");
    if (mat_.rows() != dim || mat_.cols() != dim) {
      throw std::invalid_argument("density matrix has wrong dimension for (n, d)");
    }
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > tol::hermitian) {
      throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(mat_.trace() - cxd(1.0, 0.0)) > tol::trace_one) {
      throw std::invalid_argument("density matrix trace differs from 1");
    }
  }

  static DensityOperator from_pure(int n, int d, const Vector& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-8) {
      throw std::invalid_argument("pure state vector is not normalized");
    }
    Matrix m = psi * psi.adjoint();
    DensityOperator rho(n, d, std::move(m));
    rho.psd_checked_ = true;
    return rho;
  }

  static DensityOperator maximally_mixed(int n, int d) {
    const std::int64_t dim = ipow(d, n);
    check_dense_dim(dim, "DensityOperator");
    DensityOperator rho(n, d, Matrix::Identity(dim, dim) / static_cast<double>(dim));
    rho.psd_checked_ = true;
    return rho;
  }

  int n() const { return n_; }
  int d() const { return d_; }
  std::int64_t dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

  // Full positivity check: min eigenvalue ≥ −1e−9.
  void validate() const {
    if (psd_checked_) return;
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::psd_floor) {
      throw std::invalid_argument("density matrix has an eigenvalue below -1e-9");
    }
    psd_checked_ = true;
  }

  // Tr[ρ²] = Σ |ρ_ij|² for Hermitian ρ.
  double purity() const { return mat_.squaredNorm(); }

 private:
  int n_;
  int d_;
  Matrix mat_;
  mutable bool psd_checked_ = false;
};

namespace detail {

// In-place multidimensional DFT buf[p] = Σ_m buf[m] ω^{sign·p·m} over Z_d^n.
inline void dft_zd(std::vector<cxd>& buf, int n, int d, int sign) {
  const auto& roots = unity_roots(d == 2 ? 4 : d);
  const int step = d == 2 ? 2 : 1;  // ω_2 = −1 = i²
  const std::int64_t dim = static_cast<std::int64_t>(buf.size());
  std::vector<cxd> slot(d);
  for (int axis = 0; axis < n; ++axis) {
    const std::int64_t stride = ipow(d, n - 1 - axis);
    for (std::int64_t block = 0; block < dim; block += stride * d) {
      for (std::int64_t off = 0; off < stride; ++off) {
        const std::int64_t base = block + off;
        for (int j = 0; j < d; ++j) slot[j] = buf[base + j * stride];
        for (int p = 0; p < d; ++p) {
          cxd acc = 0.0;
          for (int j = 0; j < d; ++j) {
            acc += slot[j] * roots[mod_d(static_cast<long long>(sign) * step * p * j,
                                         d == 2 ? 4 : d)];
          }
          buf[base + p * stride] = acc;
        }
      }
    }
  }
}

// Π_i ξ^{−p_i q_i}: the k-independent prefactor of the Weyl diagonal walk.
inline cxd weyl_walk_prefactor(const std::array<int, kMaxSites>& p,
                               const std::array<int, kMaxSites>& q, int n, int d) {
  const int order = d == 2 ? 4 : d;
  const int halfinv = d == 2 ? 0 : (d + 1) / 2;
  long long expo = 0;
  for (int i = 0; i < n; ++i) {
    if (d == 2) {
      expo += -static_cast<long long>(p[i]) * q[i];
    } else {
      expo += static_cast<long long>(halfinv) * (-static_cast<long long>(p[i]) * q[i]);
    }
  }
  return unity_roots(order)[mod_d(expo, order)];
}

}  // namespace detail

// Table of Tr[A·w(−x)] over all x — the Weyl-basis analysis of an arbitrary
// operator.  For a state this is exactly its characteristic function.
//
// Per column shift q the trace walks one generalized diagonal of A, and the
// walk over p is a multidimensional DFT:
//   Ξ(p,q) = Π_i ξ^{−p_i q_i} · Σ_m A[m+q, m] ω^{−p·m}.
inline CharFunction weyl_transform(const Matrix& a, int n, int d) {
  const std::int64_t dim = ipow(d, n);
  if (a.rows() != dim || a.cols() != dim) {
    throw std::invalid_argument("weyl_transform: matrix dimension mismatch");
  }
  std::vector<cxd> table(dim * dim);
  std::vector<cxd> buf(dim);
  std::array<int, detail::kMaxSites> qd{}, md{}, pd{}, sum{};
  for (std::int64_t qi = 0; qi < dim; ++qi) {
    detail::decode_index(qi, n, d, qd);
    for (std::int64_t m = 0; m < dim; ++m) {
      detail::decode_index(m, n, d, md);
      for (int i = 0; i < n; ++i) sum[i] = md[i] + qd[i] >= d ? md[i] + qd[i] - d : md[i] + qd[i];
      buf[m] = a(detail::encode_index(sum, n, d), m);
    }
    detail::dft_zd(buf, n, d, -1);
    for (std::int64_t pi = 0; pi < dim; ++pi) {
      detail::decode_index(pi, n, d, pd);
      table[pi * dim + qi] = detail::weyl_walk_prefactor(pd, qd, n, d) * buf[pi];
    }
  }
  return CharFunction(n, d, std::move(table));
}

// Ξ_ρ(x) = Tr[ρ w(−x)].
inline CharFunction char_function(const DensityOperator& rho) {
  rho.validate();
  return weyl_transform(rho.matrix(), rho.n(), rho.d());
}

// ρ = d^{−n} Σ_x Ξ(x) w(x).  The result satisfies Hermiticity and unit
// trace whenever the table does; positivity is the caller's concern.
// Inverse of the per-q diagonal-walk form of weyl_transform:
//   A[m+q, m] = d^{−n} Σ_p [Ξ(p,q) / Π_i ξ^{−p_i q_i}] ω^{+p·m}.
inline DensityOperator inverse_char(const CharFunction& xi) {
  const int n = xi.n();
  const int d = xi.d();
  const std::int64_t dim = ipow(d, n);
  check_dense_dim(dim, "inverse_char");
  Matrix m = Matrix::Zero(dim, dim);
  std::vector<cxd> buf(dim);
  std::array<int, detail::kMaxSites> qd{}, md{}, pd{}, sum{};
  for (std::int64_t qi = 0; qi < dim; ++qi) {
    detail::decode_index(qi, n, d, qd);
    for (std::int64_t pi = 0; pi < dim; ++pi) {
      detail::decode_index(pi, n, d, pd);
      buf[pi] = xi[pi * dim + qi] * std::conj(detail::weyl_walk_prefactor(pd, qd, n, d));
    }
    detail::dft_zd(buf, n, d, +1);
    for (std::int64_t mi = 0; mi < dim; ++mi) {
      detail::decode_index(mi, n, d, md);
      for (int i = 0; i < n; ++i) sum[i] = md[i] + qd[i] >= d ? md[i] + qd[i] - d : md[i] + qd[i];
      m(detail::encode_index(sum, n, d), mi) = buf[mi] / static_cast<double>(dim);
    }
  }
  return DensityOperator(n, d, std::move(m));
}

// −Σ λ log λ in natural-log units.  Eigenvalues in [−1e−9, 0] are clamped
// to 0; anything lower signals an invalid state upstream.
inline double von_neumann_entropy(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < tol::psd_floor) {
      throw std::invalid_argument("entropy: eigenvalue below -1e-9, state is invalid");
    }
    if (lam > 0.0) s -= lam * std::log(lam);
  }
  return s;
}

// Half the trace norm of ρ − σ.
inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.n() != sigma.n() || rho.d() != sigma.d()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix() - sigma.matrix(),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace magicflow
