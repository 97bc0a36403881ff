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

#include <algorithm>
#include <set>

#include "magicflow/operators.hpp"
#include "magicflow/phase_space.hpp"

using namespace magicflow;

namespace {

PhasePoint pt1(int d, int p, int q) { return PhasePoint(d, {p}, {q}); }

PhasePoint random_point(Rng& rng, int n, int d) {
  std::vector<int> p(n), q(n);
  for (int i = 0; i < n; ++i) {
    p[i] = rng.uniform_int(d);
    q[i] = rng.uniform_int(d);
  }
  return PhasePoint(d, std::move(p), std::move(q));
}

std::set<std::int64_t> index_set(const std::vector<PhasePoint>& pts) {
  std::set<std::int64_t> s;
  for (const auto& x : pts) s.insert(x.index());
  return s;
}

// Read off c in w(x)w(y) = ω^c w(y)w(x) from dense matrices.
int commutation_exponent(const PhasePoint& x, const PhasePoint& y) {
  const Matrix lhs = weyl_matrix(x) * weyl_matrix(y);
  const Matrix rhs_base = weyl_matrix(y) * weyl_matrix(x);
  for (int c = 0; c < x.d; ++c) {
    const cxd omega_c = std::polar(1.0, 2.0 * M_PI * c / x.d);
    if ((lhs - omega_c * rhs_base).cwiseAbs().maxCoeff() < 1e-12) return c;
  }
  FAIL("Weyl matrices do not commute up to a d-th root of unity");
  return -1;
}

}  // namespace

TEST_CASE("dimension validation") {
  CHECK(is_valid_dimension(2));
  CHECK(is_valid_dimension(3));
  CHECK(is_valid_dimension(7));
  CHECK(is_valid_dimension(11));
  CHECK_FALSE(is_valid_dimension(4));
  CHECK_FALSE(is_valid_dimension(9));
  CHECK_FALSE(is_valid_dimension(15));
  CHECK_FALSE(is_valid_dimension(1));
  CHECK_THROWS_AS(PhasePoint(4, {1}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(PhasePoint(9, {1}, {0}), std::invalid_argument);
}

TEST_CASE("symplectic product is zero on the diagonal") {
  Rng rng(11);
  for (int d : {2, 7, 11}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = random_point(rng, 2, d);
      CHECK(symplectic_product(x, x) == 0);
    }
  }
}

TEST_CASE("symplectic product matches the dense commutation oracle, d=7") {
  // For the two elementary labels the pairing must reproduce the scalar in
  // w(1,0)w(0,1) = ω^c w(0,1)w(1,0).
  const auto z = pt1(7, 1, 0);
  const auto x = pt1(7, 0, 1);
  const int c = commutation_exponent(z, x);
  CHECK(c == symplectic_product(z, x));
  CHECK(c == 1);
}

TEST_CASE("symplectic product matches the dense commutation oracle, d=2") {
  // Y and Z anticommute.
  const auto y = pt1(2, 1, 1);
  const auto z = pt1(2, 1, 0);
  CHECK(symplectic_product(y, z) == 1);
  CHECK(commutation_exponent(y, z) == 1);
}

TEST_CASE("commutation oracle over all pairs at (d=7,n=1) and (d=2,n=2)") {
  for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 2}}) {
    const std::int64_t points = ipow(d, 2 * n);
    for (std::int64_t i = 0; i < points; ++i) {
      for (std::int64_t j = 0; j < points; ++j) {
        const auto x = PhasePoint::from_index(i, n, d);
        const auto y = PhasePoint::from_index(j, n, d);
        const Matrix lhs = weyl_matrix(x) * weyl_matrix(y);
        const cxd omega_c =
            std::polar(1.0, 2.0 * M_PI * symplectic_product(x, y) / d);
        const Matrix rhs = omega_c * (weyl_matrix(y) * weyl_matrix(x));
        REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("bilinearity and antisymmetry") {
  Rng rng(42);
  for (int d : {2, 7}) {
    for (int rep = 0; rep < 50; ++rep) {
      const int a = rng.uniform_int(d);
      const int b = rng.uniform_int(d);
      const auto x = random_point(rng, 3, d);
      const auto y = random_point(rng, 3, d);
      const auto z = random_point(rng, 3, d);
      const int lhs = symplectic_product(x.scaled(a) + y.scaled(b), z);
      const int rhs = mod_d(static_cast<long long>(a) * symplectic_product(x, z) +
                                static_cast<long long>(b) * symplectic_product(y, z),
                            d);
      CHECK(lhs == rhs);
      CHECK(symplectic_product(x, y) == mod_d(-symplectic_product(y, x), d));
    }
  }
}

TEST_CASE("symplectic product rejects mismatched systems") {
  CHECK_THROWS_AS(symplectic_product(pt1(7, 1, 0), pt1(5, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(symplectic_product(pt1(7, 1, 0), PhasePoint(7, {1, 0}, {0, 0})),
                  std::invalid_argument);
}

TEST_CASE("span basics") {
  SECTION("empty input yields the zero point") {
    const auto s = span({}, 2, 3);
    REQUIRE(s.size() == 1);
    CHECK(s.front().is_zero());
  }
  SECTION("cyclic closure at d=3") {
    const auto s = span({pt1(3, 1, 0)}, 1, 3);
    CHECK(index_set(s) == index_set({pt1(3, 0, 0), pt1(3, 1, 0), pt1(3, 2, 0)}));
  }
  SECTION("two independent generators at d=2, n=2") {
    const PhasePoint g1(2, {1, 0}, {0, 0});
    const PhasePoint g2(2, {0, 1}, {0, 0});
    const auto s = span({g1, g2}, 2, 2);
    REQUIRE(s.size() == 4);
    for (const auto& x : s) {
      CHECK(x.q == std::vector<int>{0, 0});
    }
  }
}

TEST_CASE("span size is always a power of d") {
  Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<PhasePoint> gens;
    for (int i = 0; i < 3; ++i) gens.push_back(random_point(rng, 2, 7));
    const auto s = span(gens, 2, 7);
    std::int64_t size = static_cast<std::int64_t>(s.size());
    while (size % 7 == 0) size /= 7;
    CHECK(size == 1);
  }
}

TEST_CASE("is_isotropic") {
  CHECK(is_isotropic({}));
  CHECK(is_isotropic({pt1(3, 1, 0), pt1(3, 2, 0)}));
  CHECK_FALSE(is_isotropic({pt1(7, 1, 0), pt1(7, 0, 1)}));
}

TEST_CASE("symplectic_reduce collapses dependent inputs") {
  SECTION("collinear points at d=3") {
    const auto basis = symplectic_reduce({pt1(3, 1, 0), pt1(3, 2, 0)});
    REQUIRE(basis.size() == 1);
    CHECK(span(basis, 1, 3).size() == 3);
  }
  SECTION("the zero point generates nothing") {
    CHECK(symplectic_reduce({pt1(7, 0, 0)}).empty());
  }
}

TEST_CASE("symplectic_reduce preserves the span on random inputs") {
  Rng rng(123);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<PhasePoint> gens;
    for (int i = 0; i < 3; ++i) gens.push_back(random_point(rng, 2, 7));
    const auto basis = symplectic_reduce(gens);
    CHECK(index_set(span(basis, 2, 7)) == index_set(span(gens, 2, 7)));
    // independence: the reduced set's span has exactly d^m points
    CHECK(static_cast<std::int64_t>(span(basis, 2, 7).size()) ==
          ipow(7, static_cast<int>(basis.size())));
  }
}

TEST_CASE("isotropic span size stays within d^n") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<PhasePoint> gens;
    for (int i = 0; i < 2; ++i) gens.push_back(random_point(rng, 2, 7));
    if (!is_isotropic(gens)) continue;
    CHECK(static_cast<std::int64_t>(span(gens, 2, 7).size()) <= ipow(7, 2));
  }
}

TEST_CASE("phase point index round trip") {
  Rng rng(9);
  for (int d : {2, 7}) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto x = random_point(rng, 3, d);
      CHECK(PhasePoint::from_index(x.index(), 3, d) == x);
    }
  }
}

TEST_CASE("isotropic subgroup validation") {
  const PhasePoint z(7, {1, 0}, {0, 0});
  const PhasePoint x(7, {0, 0}, {1, 0});
  CHECK_NOTHROW(IsotropicSubgroup(2, 7, {z}, {cxd(1.0, 0.0)}));
  CHECK_THROWS_AS(IsotropicSubgroup(2, 7, {z, x}, {cxd(1.0, 0.0), cxd(1.0, 0.0)}),
                  std::invalid_argument);
  // dependent generators
  CHECK_THROWS_AS(IsotropicSubgroup(2, 7, {z, z.scaled(2)}, {cxd(1.0, 0.0), cxd(1.0, 0.0)}),
                  std::invalid_argument);
  // non-unit phase
  CHECK_THROWS_AS(IsotropicSubgroup(2, 7, {z}, {cxd(0.5, 0.0)}), std::invalid_argument);
  CHECK(IsotropicSubgroup::trivial(2, 7).size() == 1);
}
