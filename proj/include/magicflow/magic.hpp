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

// Mean-state extraction and the magic-class classifiers.
//
// The mean state M(ρ) keeps the unit-modulus values of Ξ_ρ and zeroes the
// rest; its support is an isotropic subgroup G of size d^{n−k}, and k is
// the magic class.  Three equivalent reads of k are computed and cross
// checked on every classification:
//
//   group size      |G| = d^{n−k}
//   symmetry count  |{a : [M, w(a)] = 0}| = d^{n+k}
//   entropy         S(M) = k·log d   (flat spectrum {0, d^{−k}})
//
// The commutant of M contains d^{n+k}/d^{n−k} = d^{2k} cosets of G; the
// element count outside G is d^{n+k} − d^{n−k}.  Reports carry both
// numbers.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "magicflow/clifford.hpp"
#include "magicflow/common.hpp"
#include "magicflow/convolution.hpp"
#include "magicflow/operators.hpp"
#include "magicflow/phase_space.hpp"

namespace magicflow {

// A mean state: the phased isotropic subgroup supporting Ξ_{M(ρ)}.
struct MeanState {
  int n = 1;
  int d = 2;
  IsotropicSubgroup group;
  std::vector<std::pair<std::int64_t, cxd>> elements;  // (point index, phase), all d^{n−k}
  int k = 0;
};

namespace detail {

// Expand (generators, phases) to the full phased group, checking that the
// phases actually close (collisions with inconsistent phases are the
// signature of a non-d-th-root generator phase).
inline std::vector<std::pair<std::int64_t, cxd>> phased_closure(const IsotropicSubgroup& g) {
  std::vector<PhasedPoint> elements{{PhasePoint::zero(g.n, g.d), cxd(1.0, 0.0)}};
  for (int i = 0; i < g.rank(); ++i) {
    const PhasedPoint gen{g.generators[i], g.phases[i]};
    const std::size_t prev = elements.size();
    PhasedPoint step = gen;
    for (int a = 1; a < g.d; ++a) {
      for (std::size_t e = 0; e < prev; ++e) {
        elements.push_back(phased_mul(elements[e], step));
      }
      step = phased_mul(step, gen);
    }
    // step is now gen^d, whose label is zero; its phase must be 1
    if (std::abs(step.phase - cxd(1.0, 0.0)) > 1e-7 || !step.x.is_zero()) {
      throw std::invalid_argument("phased group does not close: generator phase is not a d-th root of unity");
    }
  }
  std::vector<std::pair<std::int64_t, cxd>> out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.emplace_back(e.x.index(), e.phase);
  return out;
}

}  // namespace detail

// Build the mean state directly from a phased isotropic subgroup.
inline MeanState mean_state_from_group(const IsotropicSubgroup& group) {
  MeanState m{group.n, group.d, group, detail::phased_closure(group),
              group.n - group.rank()};
  return m;
}

// Extract the mean state of a table: support = {x : |Ξ(x)| ≥ 1 − tol},
// phases verbatim.  The support must be a closed isotropic subgroup with
// multiplicative phases; anything else signals a mischosen tol or an
// invalid table.
inline MeanState mean_state(const CharFunction& xi, double tol = tol::unit_modulus) {
  if (!(tol > 0.0 && tol < 0.5)) {
    throw std::invalid_argument("mean_state: tol must lie in (0, 0.5)");
  }
  const int n = xi.n();
  const int d = xi.d();
  std::vector<PhasePoint> support;
  std::vector<std::pair<std::int64_t, cxd>> elements;
  for (std::int64_t i = 0; i < xi.table_size(); ++i) {
    if (std::abs(xi[i]) >= 1.0 - tol) {
      // tol only selects the support; the captured values themselves must
      // sit on the unit circle, or the threshold swallowed a decaying entry
      if (std::abs(std::abs(xi[i]) - 1.0) > 1e-6) {
        throw std::invalid_argument(
            "mean_state: support value is not unit modulus (tol mischosen?)");
      }
      support.push_back(xi.point(i));
      elements.emplace_back(i, xi[i]);
    }
  }
  const std::vector<PhasePoint> basis = symplectic_reduce(support);
  const int rank = static_cast<int>(basis.size());
  if (ipow(d, rank) != static_cast<std::int64_t>(support.size())) {
    throw std::invalid_argument("mean_state: unit-modulus support is not a closed subgroup");
  }
  if (!is_isotropic(basis)) {
    throw std::invalid_argument("mean_state: unit-modulus support is not isotropic");
  }
  // The phases must be multiplicative over the group: Ξ(x+y) = Ξ(x)Ξ(y)φ(x,y).
  // Checking every (generator, element) pair suffices: the relation extends
  // to arbitrary pairs by associativity of the underlying operator products.
  for (const auto& g : basis) {
    const cxd gphase = xi[g.index()];
    for (const auto& [yj_idx, yphase] : elements) {
      const PhasePoint y = xi.point(yj_idx);
      const cxd expected = gphase * yphase * weyl_product_phase(g, y);
      if (std::abs(xi[(g + y).index()] - expected) > 1e-6) {
        throw std::invalid_argument("mean_state: support phases are not multiplicative");
      }
    }
  }
  std::vector<cxd> phases;
  phases.reserve(rank);
  for (const auto& b : basis) phases.push_back(xi[b.index()]);
  MeanState m{n, d, IsotropicSubgroup(n, d, basis, std::move(phases)),
              std::move(elements), n - rank};
  return m;
}

// Dense realization (1/d^n) Σ_{x∈G} Ξ(x) w(x).
inline DensityOperator mean_state_dense(const MeanState& m) {
  const std::int64_t dim = ipow(m.d, m.n);
  check_dense_dim(dim, "mean_state_dense");
  Matrix mat = Matrix::Zero(dim, dim);
  for (const auto& [idx, phase] : m.elements) {
    const auto act = detail::weyl_action(PhasePoint::from_index(idx, m.n, m.d));
    for (std::int64_t c = 0; c < dim; ++c) mat(act.perm[c], c) += phase * act.amp[c];
  }
  mat /= static_cast<double>(dim);
  return DensityOperator(m.n, m.d, std::move(mat));
}

inline int class_index(const MeanState& m) { return m.k; }

inline std::int64_t group_size(const MeanState& m) { return m.group.size(); }

namespace detail {

// Literal commutant count: scan all d^{2n} Weyl operators and test
// ‖[M, w(a)]‖_F against the zero threshold, exploiting that w(a) has one
// nonzero per column.
inline std::int64_t dense_commutant_count(const MeanState& m) {
  const DensityOperator rho = mean_state_dense(m);
  const Matrix& mat = rho.matrix();
  const std::int64_t dim = mat.rows();
  const std::int64_t points = ipow(m.d, 2 * m.n);
  std::int64_t count = 0;
  std::vector<std::int64_t> inv_perm(dim);
  for (std::int64_t a = 0; a < points; ++a) {
    const auto act = weyl_action(PhasePoint::from_index(a, m.n, m.d));
    for (std::int64_t k = 0; k < dim; ++k) inv_perm[act.perm[k]] = k;
    double norm2 = 0.0;
    for (std::int64_t r = 0; r < dim; ++r) {
      const std::int64_t rs = inv_perm[r];
      for (std::int64_t c = 0; c < dim; ++c) {
        // (wM)[r,c] = amp(σ⁻¹r)·M[σ⁻¹r, c];  (Mw)[r,c] = M[r, σc]·amp(c)
        const cxd wm = act.amp[rs] * mat(rs, c);
        const cxd mw = mat(r, act.perm[c]) * act.amp[c];
        norm2 += std::norm(wm - mw);
      }
    }
    if (std::sqrt(norm2) < tol::commutator_zero) ++count;
  }
  return count;
}

}  // namespace detail

// Number of Weyl operators commuting with M.  The fast path is symplectic:
// the commutant is the orthogonal complement of G under the form, of size
// d^{2n}/|G|.  At desk scale the literal commutator count is run as well
// and any disagreement is a hard error.
inline std::int64_t symmetry_count(const MeanState& m,
                                   std::optional<bool> dense_check = std::nullopt) {
  const std::int64_t fast = ipow(m.d, 2 * m.n) / m.group.size();
  const bool run_dense =
      dense_check.value_or(ipow(m.d, 2 * m.n) <= dense_dim_cap());
  if (run_dense) {
    const std::int64_t dense = detail::dense_commutant_count(m);
    if (dense != fast) {
      throw std::runtime_error("symmetry_count: symplectic and dense paths disagree (" +
                               std::to_string(fast) + " vs " + std::to_string(dense) + ")");
    }
  }
  return fast;
}

// k from the entropy of the dense realization: S(M)/log d rounded, with a
// hard integrality check.
inline int entropy_class(const MeanState& m) {
  const double s = von_neumann_entropy(mean_state_dense(m));
  const double ratio = s / std::log(static_cast<double>(m.d));
  const int k = static_cast<int>(std::llround(ratio));
  if (std::abs(ratio - k) > tol::entropy_ratio) {
    throw std::runtime_error("entropy_class: S/log d is not an integer; not a mean state");
  }
  return k;
}

// MG(ρ) = 1 − max{|Ξ(x)| : x on the support, |Ξ(x)| ≠ 1}, and 0 when that
// set is empty (stabilizer states).
inline double magic_gap(const CharFunction& xi, double unit_tol = tol::unit_modulus) {
  const double largest = detail::largest_subunit(xi, unit_tol);
  return largest == 0.0 ? 0.0 : 1.0 - largest;
}

// Upper bound on |S(M(ψ)) − S(⊠_L ψ)|:  log[1 + (1−MG)^{2^{L+1}−2} e^{S_M}].
inline double entropy_bound(int steps, double magic_gap_value, double mean_entropy) {
  if (steps < 1) throw std::invalid_argument("entropy_bound: L must be >= 1");
  if (magic_gap_value < 0.0 || magic_gap_value > 1.0) {
    throw std::invalid_argument("entropy_bound: MG must lie in [0, 1]");
  }
  if (mean_entropy < 0.0) throw std::invalid_argument("entropy_bound: S(M) must be >= 0");
  const double exponent = std::ldexp(2.0, steps) - 2.0;  // 2^{L+1} − 2
  double factor;
  if (magic_gap_value >= 1.0) {
    factor = 0.0;
  } else {
    factor = std::exp(exponent * std::log1p(-magic_gap_value));
  }
  return std::log1p(factor * std::exp(mean_entropy));
}

// Minimal L whose entropy bound (with the worst-case S_M = n log d) drops
// below the class-separating margin log(d)/2.
inline int required_iterations(int n, int d, double magic_gap_value) {
  require_valid_dimension(d);
  if (magic_gap_value <= 0.0) {
    throw std::invalid_argument(
        "required_iterations: MG = 0 gives no convergence handle "
        "(stabilizer input or degenerate spectrum)");
  }
  const double target = 0.5 * std::log(static_cast<double>(d));
  const double worst_entropy = n * std::log(static_cast<double>(d));
  for (int steps = 1; steps <= 4096; ++steps) {
    if (entropy_bound(steps, magic_gap_value, worst_entropy) < target) return steps;
  }
  throw std::runtime_error("required_iterations: bound did not drop below log(d)/2");
}

struct VerdictSet {
  int k_group = -1;
  int k_symmetry = -1;
  int k_entropy = -1;
  bool agree = false;
};

struct MagicClassReport {
  int d = 2;
  int n = 1;
  int k = 0;
  std::int64_t group_size = 0;
  std::int64_t symmetry_count = 0;            // commutant size d^{n+k}
  std::int64_t commutant_outside_group = 0;   // d^{n+k} − d^{n−k}
  std::int64_t commutant_group_quotient = 0;  // d^{2k}
  double entropy = 0.0;                       // S(M)
  double magic_gap = 0.0;
  int iterations_used = 0;
  std::optional<ConvParams> params;  // set when the flow ran (odd d)
  VerdictSet verdicts;
  bool pure_state_semantics = true;  // class semantics are for pure states
  double purity = 1.0;
};

// The three characterizations are provably equivalent, so a disagreement
// is an implementation fault, never a data condition; the offending report
// rides along for diagnosis.
struct verdict_error : std::runtime_error {
  MagicClassReport report;
  verdict_error(const std::string& what, MagicClassReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

struct ClassifyOptions {
  std::optional<ConvParams> params;        // odd-d flow parameters
  int flow_steps = 0;                      // 0: classify directly from Ξ
  std::optional<bool> dense_check;         // default: auto by size
};

namespace detail {

inline MagicClassReport classify_table(CharFunction xi, double purity,
                                       const ClassifyOptions& opt) {
  MagicClassReport report;
  report.d = xi.d();
  report.n = xi.n();
  report.purity = purity;
  report.pure_state_semantics = purity > 1.0 - 1e-8;
  report.magic_gap = magic_gap(xi);
  report.iterations_used = 0;

  double tol_used = tol::unit_modulus;
  if (opt.flow_steps > 0) {
    std::optional<ConvParams> params;
    if (xi.d() != 2) params = opt.params ? *opt.params : default_params(xi.d());
    for (int step = 0; step < opt.flow_steps; ++step) {
      xi = self_convolve_char(xi, params);
    }
    report.iterations_used = opt.flow_steps;
    report.params = params;
    // Persistent values sit at |Ξ| = 1 exactly; decayed ones are at least
    // the (squared-down) gap below.  Half the current gap splits them.
    const double gap_now = 1.0 - largest_subunit(xi, tol::unit_modulus);
    tol_used = std::min(0.49, std::max(tol::unit_modulus, 0.5 * gap_now));
  }

  const MeanState mean = mean_state(xi, tol_used);
  report.k = class_index(mean);
  report.group_size = magicflow::group_size(mean);
  report.symmetry_count = magicflow::symmetry_count(mean, opt.dense_check);
  report.commutant_outside_group = report.symmetry_count - report.group_size;
  report.verdicts.k_group = report.k;
  // d^{n+k_sym} = commutant size
  const double log_d = std::log(static_cast<double>(report.d));
  report.verdicts.k_symmetry =
      static_cast<int>(std::llround(std::log(static_cast<double>(report.symmetry_count)) / log_d)) -
      report.n;
  report.entropy = von_neumann_entropy(mean_state_dense(mean));
  const double ratio = report.entropy / log_d;
  report.verdicts.k_entropy = static_cast<int>(std::llround(ratio));
  if (std::abs(ratio - report.verdicts.k_entropy) > tol::entropy_ratio) {
    throw std::runtime_error("classify: S(M)/log d is not an integer; not a mean state");
  }
  report.commutant_group_quotient = ipow(report.d, 2 * report.verdicts.k_symmetry);
  report.verdicts.agree = report.verdicts.k_group == report.verdicts.k_symmetry &&
                          report.verdicts.k_group == report.verdicts.k_entropy;
  if (!report.verdicts.agree) {
    throw verdict_error("classify: group/symmetry/entropy characterizations disagree", report);
  }
  return report;
}

}  // namespace detail

inline MagicClassReport classify(const DensityOperator& rho, const ClassifyOptions& opt = {}) {
  rho.validate();
  return detail::classify_table(char_function(rho), rho.purity(), opt);
}

// Classification straight from a char table; the purity comes from the
// table itself, d^{−n} Σ |Ξ|².
inline MagicClassReport classify_char(const CharFunction& xi, const ClassifyOptions& opt = {}) {
  xi.validate();
  double purity = 0.0;
  for (std::int64_t i = 0; i < xi.table_size(); ++i) purity += std::norm(xi[i]);
  purity /= static_cast<double>(ipow(xi.d(), xi.n()));
  return detail::classify_table(xi, purity, opt);
}

// U_cl · M · U†_cl with the canonicalizing Clifford of the mean state's
// group: always |0⟩⟨0|^{⊗(n−k)} ⊗ (I/d)^{⊗k} for a genuine mean state.
inline Matrix canonical_form(const MeanState& m) {
  const CliffordCircuit u = canonicalize(m.group);
  const Matrix dense = mean_state_dense(m).matrix();
  const Matrix uu = circuit_unitary(u);
  return uu * dense * uu.adjoint();
}

// The target of canonicalization: |0⟩⟨0|^{⊗(n−k)} ⊗ (I/d)^{⊗k}.
inline Matrix canonical_product_form(int n, int d, int k) {
  const std::int64_t dim = ipow(d, n);
  check_dense_dim(dim, "canonical_product_form");
  const std::int64_t dk = ipow(d, k);
  Matrix m = Matrix::Zero(dim, dim);
  for (std::int64_t j = 0; j < dk; ++j) m(j, j) = 1.0 / static_cast<double>(dk);
  return m;
}

// Same-class predicate for pure states: equality of class indices, with the
// canonical forms compared as a consistency check whenever both mean
// states fit in the dense cap.
inline bool same_cg_class(const DensityOperator& psi, const DensityOperator& phi) {
  if (psi.n() != phi.n() || psi.d() != phi.d()) {
    throw std::invalid_argument("same_cg_class: states live on different systems");
  }
  psi.validate();
  phi.validate();
  if (psi.purity() <= 1.0 - 1e-8 || phi.purity() <= 1.0 - 1e-8) {
    throw std::invalid_argument("same_cg_class: class semantics are defined for pure states");
  }
  const MeanState ma = mean_state(char_function(psi));
  const MeanState mb = mean_state(char_function(phi));
  const bool same = ma.k == mb.k;
  if (same && psi.dim() <= dense_dim_cap()) {
    const Matrix fa = canonical_form(ma);
    const Matrix fb = canonical_form(mb);
    if ((fa - fb).cwiseAbs().maxCoeff() > tol::canonical_form) {
      throw std::runtime_error("same_cg_class: equal class indices but different canonical forms");
    }
  }
  return same;
}

}  // namespace magicflow
