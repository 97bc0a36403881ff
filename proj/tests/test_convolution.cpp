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

#include <catch2/catch.hpp>

#include "magicflow/convolution.hpp"
#include "magicflow/magic.hpp"
#include "magicflow/states.hpp"

using namespace magicflow;

namespace {

// Literal-route convolution: materialized U_{s,t}, Kronecker product,
// conjugation and partial trace over B.  Oracle for convolve_dense.
DensityOperator convolve_by_matrices(const DensityOperator& rho, const DensityOperator& sigma,
                                     const ConvParams& params) {
  const std::int64_t dn = rho.dim();
  Matrix joint = Matrix::Zero(dn * dn, dn * dn);
  for (std::int64_t i = 0; i < dn; ++i) {
    for (std::int64_t j = 0; j < dn; ++j) {
      joint.block(i * dn, j * dn, dn, dn) = rho.matrix()(i, j) * sigma.matrix();
    }
  }
  const Matrix u = u_st(params, rho.n());
  const Matrix conj = u * joint * u.adjoint();
  Matrix out = Matrix::Zero(dn, dn);
  for (std::int64_t a = 0; a < dn; ++a) {
    for (std::int64_t a2 = 0; a2 < dn; ++a2) {
      cxd acc = 0.0;
      for (std::int64_t b = 0; b < dn; ++b) acc += conj(a * dn + b, a2 * dn + b);
      out(a, a2) = acc;
    }
  }
  return DensityOperator(rho.n(), rho.d(), std::move(out));
}

double max_table_diff(const CharFunction& a, const CharFunction& b) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < a.table_size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("find_params") {
  SECTION("d=7 has exactly the four (s,t) with s^2+t^2=1") {
    const auto params = find_params(7);
    REQUIRE(params.size() == 4);
    CHECK(params[0].s == 2);
    CHECK(params[0].t == 2);
    CHECK(params[1].s == 2);
    CHECK(params[1].t == 5);
    CHECK(params[2].s == 5);
    CHECK(params[2].t == 2);
    CHECK(params[3].s == 5);
    CHECK(params[3].t == 5);
  }
  SECTION("d=3 and d=5 report the documented empty-result error") {
    CHECK_THROWS_AS(find_params(3), no_convolution_params);
    CHECK_THROWS_AS(find_params(5), no_convolution_params);
    CHECK_THROWS_WITH(find_params(5), Catch::Contains("no nontrivial parameters"));
  }
  SECTION("d=11 has solutions") {
    CHECK_FALSE(find_params(11).empty());
    CHECK(default_params(11).s > 1);
  }
  SECTION("d=2 is not a two-input configuration") {
    CHECK_THROWS_AS(find_params(2), std::invalid_argument);
  }
  SECTION("parameter validation") {
    CHECK_NOTHROW(ConvParams(2, 2, 7));
    CHECK_THROWS_AS(ConvParams(3, 2, 7), std::invalid_argument);  // 9+4 != 1
    CHECK_THROWS_AS(ConvParams(1, 0, 7), std::invalid_argument);  // trivial
  }
}

TEST_CASE("u_st") {
  const ConvParams p(2, 2, 7);
  SECTION("exact permutation unitarity") {
    const Matrix u = u_st(p, 1);
    CHECK((u.adjoint() * u - Matrix::Identity(49, 49)).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("|1,0⟩ goes to |2,5⟩ for (s,t)=(2,2) at d=7") {
    const Matrix u = u_st(p, 1);
    Vector in = Vector::Zero(49);
    in(1 * 7 + 0) = 1.0;
    const Vector out = u * in;
    CHECK(std::abs(out(2 * 7 + 5) - cxd(1, 0)) < 1e-15);
  }
  SECTION("the basis map is a bijection") {
    const Matrix u = u_st(p, 1);
    for (int col = 0; col < 49; ++col) {
      CHECK(u.col(col).cwiseAbs().sum() == 1.0);
      CHECK(u.row(col).cwiseAbs().sum() == 1.0);
    }
  }
  SECTION("size cap") {
    CHECK_THROWS_AS(u_st(p, 3), size_cap_error);  // 7^6 > 2^14
  }
}

TEST_CASE("convolve_dense") {
  const ConvParams p(2, 2, 7);
  SECTION("maximally mixed is a fixed point") {
    const auto mm = DensityOperator::maximally_mixed(1, 7);
    const auto out = convolve_dense(mm, mm, p);
    CHECK((out.matrix() - mm.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("index-mapped route equals the literal matrix route") {
    Rng rng(500);
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_pure_state(1, 7, rng);
      const auto b = random_density(1, 7, rng);
      const auto fast = convolve_dense(a, b, p);
      const auto literal = convolve_by_matrices(a, b, p);
      REQUIRE((fast.matrix() - literal.matrix()).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
  SECTION("stabilizer inputs give stabilizer outputs") {
    Rng rng(501);
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_stabilizer_state(1, 7, rng);
      const auto b = random_stabilizer_state(1, 7, rng);
      const auto xi = char_function(convolve_dense(a, b, p));
      for (std::int64_t i = 0; i < xi.table_size(); ++i) {
        const double mag = std::abs(xi[i]);
        REQUIRE(std::min(mag, std::abs(mag - 1.0)) < 1e-9);
      }
    }
  }
  SECTION("dimension and parameter mismatches are rejected") {
    const auto mm2 = DensityOperator::maximally_mixed(2, 7);
    const auto mm1 = DensityOperator::maximally_mixed(1, 7);
    CHECK_THROWS_AS(convolve_dense(mm1, mm2, p), std::invalid_argument);
    CHECK_THROWS_AS(convolve_dense(DensityOperator::maximally_mixed(1, 11),
                                   DensityOperator::maximally_mixed(1, 11), p),
                    std::invalid_argument);
  }
}

TEST_CASE("convolve_char duality against the dense path") {
  Rng rng(502);
  for (int d : {7, 11}) {
    for (const auto& params : find_params(d)) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto a = random_pure_state(1, d, rng);
        const auto b = random_pure_state(1, d, rng);
        const auto via_dense = char_function(convolve_dense(a, b, params));
        const auto via_char = convolve_char(char_function(a), char_function(b), params);
        REQUIRE(max_table_diff(via_dense, via_char) < tol::duality);
      }
    }
  }
}

TEST_CASE("convolve_char basics") {
  const ConvParams p(2, 2, 7);
  SECTION("a delta table absorbs anything") {
    Rng rng(503);
    const auto xi = char_function(random_pure_state(1, 7, rng));
    const auto delta = char_function(DensityOperator::maximally_mixed(1, 7));
    const auto out = convolve_char(xi, delta, p);
    CHECK(std::abs(out[0] - cxd(1, 0)) < 1e-14);
    for (std::int64_t i = 1; i < out.table_size(); ++i) CHECK(std::abs(out[i]) < 1e-14);
  }
  SECTION("support never grows under self-convolution") {
    Rng rng(504);
    const auto xi = char_function(random_stabilizer_state(1, 7, rng));
    const auto out = convolve_char(xi, xi, p);
    for (std::int64_t i = 0; i < out.table_size(); ++i) {
      if (std::abs(out[i]) > 1e-12) CHECK(std::abs(xi[i]) > 1e-12);
    }
  }
}

TEST_CASE("key unitary for qubit triples") {
  SECTION("n=1 is an 8x8 permutation") {
    const Matrix v = key_unitary_qubit(1);
    CHECK((v.adjoint() * v - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
    for (int col = 0; col < 8; ++col) CHECK(v.col(col).cwiseAbs().sum() == 1.0);
  }
  SECTION("matches the explicit CNOT word, and U|100⟩ = |111⟩") {
    // (CNOT_{2→1} CNOT_{3→1})(CNOT_{1→2} CNOT_{1→3}), CNOT_{a→b}: x_b += x_a
    const auto cnot = [](int a, int b) {
      Matrix m = Matrix::Zero(8, 8);
      for (int x = 0; x < 8; ++x) {
        int bits[3] = {(x >> 2) & 1, (x >> 1) & 1, x & 1};
        bits[b - 1] ^= bits[a - 1];
        m((bits[0] << 2) | (bits[1] << 1) | bits[2], x) = 1.0;
      }
      return m;
    };
    const Matrix u = cnot(2, 1) * cnot(3, 1) * cnot(1, 2) * cnot(1, 3);
    CHECK((u - key_unitary_qubit(1)).cwiseAbs().maxCoeff() < 1e-14);
    Vector in = Vector::Zero(8);
    in(0b100) = 1.0;
    const Vector out = u * in;
    CHECK(std::abs(out(0b111) - cxd(1, 0)) < 1e-15);  // frozen regression
  }
  SECTION("V^2 keeps computational basis states in the basis") {
    const Matrix v = key_unitary_qubit(1);
    const Matrix v2 = v * v;
    Vector in = Vector::Zero(8);
    in(0) = 1.0;
    const Vector out = v2 * in;
    int nonzero = 0;
    for (int i = 0; i < 8; ++i) {
      if (std::abs(out(i)) > 1e-12) ++nonzero;
    }
    CHECK(nonzero == 1);
  }
}

TEST_CASE("convolve3_dense") {
  SECTION("three maximally mixed inputs") {
    const auto mm = DensityOperator::maximally_mixed(2, 2);
    const auto out = convolve3_dense(mm, mm, mm);
    CHECK((out.matrix() - mm.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("three |0⟩⟨0| inputs") {
    const auto z = zeros_state(1, 2);
    const auto out = convolve3_dense(z, z, z);
    CHECK((out.matrix() - z.matrix()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("frozen regression: the T-state triple") {
    const auto t = DensityOperator::from_pure(1, 2, magic_state_vector(2));
    const auto xi = char_function(convolve3_dense(t, t, t));
    const double r = 1.0 / (2.0 * std::sqrt(2.0));
    CHECK(std::abs(xi[0] - cxd(1, 0)) < 1e-12);   // (p,q) = (0,0)
    CHECK(std::abs(xi[1] - cxd(r, 0)) < 1e-12);   // (0,1): X label
    CHECK(std::abs(xi[2]) < 1e-12);               // (1,0): Z label
    CHECK(std::abs(xi[3] - cxd(-r, 0)) < 1e-12);  // (1,1): Y label picks up the sign
  }
  SECTION("qudit inputs are rejected") {
    const auto mm7 = DensityOperator::maximally_mixed(1, 7);
    CHECK_THROWS_AS(convolve3_dense(mm7, mm7, mm7), std::invalid_argument);
  }
}

TEST_CASE("convolve3_char equals the dense path after the validation gate") {
  REQUIRE(qubit_duality_validation().passed);
  Rng rng(505);
  for (int n : {1, 2}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_pure_state(n, 2, rng);
      const auto b = random_pure_state(n, 2, rng);
      const auto c = random_density(n, 2, rng);
      const auto via_dense = char_function(convolve3_dense(a, b, c));
      const auto via_char = convolve3_char(char_function(a), char_function(b), char_function(c));
      REQUIRE(max_table_diff(via_dense, via_char) < tol::duality);
    }
  }
  SECTION("stabilizer stability on the qubit path") {
    Rng rng2(506);
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_stabilizer_state(2, 2, rng2);
      const auto out = convolve3_char(char_function(a), char_function(a), char_function(a));
      for (std::int64_t i = 0; i < out.table_size(); ++i) {
        const double mag = std::abs(out[i]);
        REQUIRE(std::min(mag, std::abs(mag - 1.0)) < 1e-9);
      }
    }
  }
}

TEST_CASE("self-convolution and iteration") {
  SECTION("stabilizer support is invariant at every L") {
    Rng rng(507);
    for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 2}}) {
      const auto rho = random_stabilizer_state(n, d, rng);
      const auto xi0 = char_function(rho);
      auto [final_state, trace] = iterate(rho, std::nullopt, 6);
      const auto xi6 = char_function(final_state);
      for (std::int64_t i = 0; i < xi0.table_size(); ++i) {
        CHECK((std::abs(xi0[i]) > 0.5) == (std::abs(xi6[i]) > 0.5));
      }
      for (const auto& step : trace.steps) CHECK(step.supnorm_gap < 1e-9);
    }
  }
  SECTION("iterate entropy never exceeds the mean-state entropy") {
    Rng rng(508);
    for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 2}}) {
      const auto rho = random_pure_state(n, d, rng);
      const auto mean = mean_state(char_function(rho));
      const double s_mean = von_neumann_entropy(mean_state_dense(mean));
      auto [final_state, trace] = iterate(rho, std::nullopt, 6);
      for (const auto& step : trace.steps) {
        CHECK(step.entropy <= s_mean + 1e-9);
      }
    }
  }
  SECTION("the d=7 magic state approaches its mean state at the gap-driven rate") {
    // MG = 1 − cos(π/7) ≈ 0.099: the slowest table entry decays like
    // (1−MG)^{2^L}, about 1.3e−3 at L=6 and 2.4e−12 at L=8.
    const auto rho = DensityOperator::from_pure(1, 7, magic_state_vector(7));
    const auto xi = char_function(rho);
    CHECK(magic_gap(xi) == Approx(1.0 - std::cos(M_PI / 7.0)).margin(1e-12));
    const auto mean = mean_state_dense(mean_state(xi));
    auto [state6, trace6] = iterate(rho, std::nullopt, 6);
    CHECK(trace_distance(state6, mean) < 2e-3);
    CHECK(trace_distance(state6, mean) > 1e-6);  // L=6 is not yet converged
    auto [state8, trace8] = iterate(rho, std::nullopt, 8);
    CHECK(trace_distance(state8, mean) < 1e-6);
    CHECK(trace8.steps.back().trace_dist_estimate < 1e-6);
  }
  SECTION("trace records strictly increasing L and the parameters used") {
    const auto rho = DensityOperator::from_pure(1, 7, magic_state_vector(7));
    auto [final_state, trace] = iterate(rho, std::nullopt, 4);
    REQUIRE(trace.steps.size() == 4);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      CHECK(trace.steps[i].L == static_cast<int>(i) + 1);
    }
    REQUIRE(trace.params.has_value());
    CHECK(trace.params->s == 2);
    CHECK(trace.params->t == 2);
  }
  SECTION("self_convolve dispatches by dimension") {
    const auto z2 = zeros_state(1, 2);
    CHECK_NOTHROW(self_convolve(z2));
    const auto z7 = zeros_state(1, 7);
    CHECK_NOTHROW(self_convolve(z7));
    const auto z5 = zeros_state(1, 5);
    CHECK_THROWS_AS(self_convolve(z5), no_convolution_params);
  }
  SECTION("L must be positive") {
    CHECK_THROWS_AS(iterate(zeros_state(1, 2), std::nullopt, 0), std::invalid_argument);
  }
  SECTION("slowly converging states are not flagged as stalled") {
    // A nearly-pure state has its slowest table entry just below 1; the
    // 0/1-distance rises for several steps while the entry crosses the
    // middle, but the sub-unit sector itself contracts every step.
    Matrix m = Matrix::Identity(7, 7) * (0.015 / 7.0);
    m(0, 0) += 0.985;
    const DensityOperator rho(1, 7, std::move(m));
    auto [state, trace] = iterate(rho, std::nullopt, 8);
    CHECK_FALSE(trace.stalled);
    // the slow entry sits at 0.985^(2^8) ≈ 0.021 by L=8 and keeps shrinking
    CHECK(trace.steps.back().supnorm_gap ==
          Approx(std::pow(0.985, 256.0)).epsilon(1e-6));
    CHECK(trace.steps[7].supnorm_gap < trace.steps[6].supnorm_gap);
  }
}

TEST_CASE("quantum central limit behavior for random pure states") {
  Rng rng(509);
  for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 2}}) {
    int tested = 0;
    while (tested < 5) {
      const auto rho = random_pure_state(n, d, rng);
      const auto xi = char_function(rho);
      if (magic_gap(xi) <= 0.05) continue;
      ++tested;
      const auto mean_dense = mean_state_dense(mean_state(xi));
      auto [final_state, trace] = iterate(rho, std::nullopt, 8);
      REQUIRE(trace_distance(final_state, mean_dense) < 1e-6);
      // once past the initial mixing the gap is nonincreasing, down to
      // numerical dust
      for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        if (trace.steps[i - 1].supnorm_gap < 1e-3 && trace.steps[i].supnorm_gap > 1e-10) {
          CHECK(trace.steps[i].supnorm_gap <= trace.steps[i - 1].supnorm_gap + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("Clifford covariance of the convolution") {
  Rng rng(510);
  for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 2}}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto rho = random_pure_state(n, d, rng);
      const auto u = random_clifford(n, d, 14, rng.next_u64());
      const auto direct = self_convolve(rho);
      const auto conjugated = self_convolve(apply(u, rho));
      // same class and identical canonical mean forms
      const auto ma = mean_state(char_function(direct));
      const auto mb = mean_state(char_function(conjugated));
      REQUIRE(ma.k == mb.k);
      CHECK((canonical_form(ma) - canonical_form(mb)).cwiseAbs().maxCoeff() <
            tol::canonical_form);
    }
  }
}
