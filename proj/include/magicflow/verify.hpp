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

// Named property suites over seeded corpora: the structural facts the
// convolution is supposed to satisfy, run as self-contained checks.
//
//   duality              dense vs char convolution, pointwise to 1e−10
//   stability            stabilizer in → stabilizer out (|Ξ| ∈ {0,1})
//   clt                  ⊠_L ρ reaches M(ρ) in trace distance by L=8
//   max-entropy          S(ρ) ≤ S(M(ρ))
//   clifford-covariance  ⊠(UρU†) and ⊠ρ share one canonical mean form

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "magicflow/clifford.hpp"
#include "magicflow/convolution.hpp"
#include "magicflow/magic.hpp"
#include "magicflow/states.hpp"

namespace magicflow {

struct SuiteResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  double worst = 0.0;  // suite-specific figure of merit (smaller is better)
  std::string detail;
};

inline SuiteResult verify_duality(std::uint64_t seed) {
  SuiteResult r;
  r.name = "duality";
  Rng rng(seed);
  for (int d : {7, 11}) {
    const auto params = find_params(d);
    for (int rep = 0; rep < 50; ++rep) {
      const auto& p = params[rep % params.size()];
      const auto a = random_pure_state(1, d, rng);
      const auto b = (rep % 2 == 0) ? random_pure_state(1, d, rng) : random_density(1, d, rng);
      const auto via_dense = char_function(convolve_dense(a, b, p));
      const auto via_char = convolve_char(char_function(a), char_function(b), p);
      for (std::int64_t i = 0; i < via_dense.table_size(); ++i) {
        r.worst = std::max(r.worst, std::abs(via_dense[i] - via_char[i]));
      }
      ++r.cases;
    }
  }
  r.passed = r.worst < tol::duality;
  r.detail = "max pointwise dense/char deviation";
  return r;
}

inline SuiteResult verify_stability(std::uint64_t seed) {
  SuiteResult r;
  r.name = "stability";
  Rng rng(seed);
  const auto record = [&r](const CharFunction& xi) {
    for (std::int64_t i = 0; i < xi.table_size(); ++i) {
      const double mag = std::abs(xi[i]);
      r.worst = std::max(r.worst, std::min(mag, std::abs(mag - 1.0)));
    }
    ++r.cases;
  };
  for (int n : {1, 2}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_stabilizer_state(n, 7, rng);
      const auto b = random_stabilizer_state(n, 7, rng);
      record(char_function(convolve_dense(a, b, default_params(7))));
      const auto qa = random_stabilizer_state(n, 2, rng);
      const auto qb = random_stabilizer_state(n, 2, rng);
      const auto qc = random_stabilizer_state(n, 2, rng);
      record(char_function(convolve3_dense(qa, qb, qc)));
    }
  }
  r.passed = r.worst < 1e-9;
  r.detail = "max distance of |Xi| from {0,1} after convolving stabilizer states";
  return r;
}

inline SuiteResult verify_clt(std::uint64_t seed) {
  SuiteResult r;
  r.name = "clt";
  Rng rng(seed);
  for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 7}, std::pair{2, 2}, std::pair{3, 2}}) {
    int tested = 0;
    int attempts = 0;
    while (tested < 8 && attempts < 200) {
      ++attempts;
      const auto rho = random_pure_state(n, d, rng);
      const auto xi = char_function(rho);
      if (magic_gap(xi) <= 0.05) continue;
      ++tested;
      const auto mean_dense = mean_state_dense(mean_state(xi));
      auto [final_state, trace] = iterate(rho, std::nullopt, 8);
      r.worst = std::max(r.worst, trace_distance(final_state, mean_dense));
      ++r.cases;
    }
  }
  r.passed = r.worst < 1e-6;
  r.detail = "max trace distance of the L=8 iterate from the mean state (MG > 0.05)";
  return r;
}

inline SuiteResult verify_max_entropy(std::uint64_t seed) {
  SuiteResult r;
  r.name = "max-entropy";
  Rng rng(seed);
  double worst_excess = -1.0;
  for (auto [n, d] : {std::pair{1, 7}, std::pair{2, 2}, std::pair{2, 7}, std::pair{3, 2}}) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto rho = (rep % 2 == 0) ? random_pure_state(n, d, rng)
                                      : random_density(n, d, rng);
      const double s_rho = von_neumann_entropy(rho);
      const double s_mean = von_neumann_entropy(mean_state_dense(mean_state(char_function(rho))));
      worst_excess = std::max(worst_excess, s_rho - s_mean);
      ++r.cases;
    }
  }
  r.worst = worst_excess;
  r.passed = worst_excess <= 1e-9;
  r.detail = "max of S(rho) - S(M(rho)) over the corpus (must be <= 0 up to noise)";
  return r;
}

inline SuiteResult verify_clifford_covariance(std::uint64_t seed) {
  SuiteResult r;
  r.name = "clifford-covariance";
  Rng rng(seed);
  for (auto [n, d] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{1, 7}, std::pair{2, 7}}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto rho = (rep % 2 == 0) ? random_pure_state(n, d, rng)
                                      : psi_k_state(n, d, rng.uniform_int(n + 1), rng.next_u64());
      const auto u = random_clifford(n, d, 16, rng.next_u64());
      const auto direct = self_convolve(rho);
      const auto conjugated = self_convolve(apply(u, rho));
      const auto ma = mean_state(char_function(direct));
      const auto mb = mean_state(char_function(conjugated));
      if (ma.k != mb.k) {
        r.worst = 1.0;
        r.detail = "class index changed under Clifford conjugation";
        return r;
      }
      r.worst = std::max(
          r.worst, (canonical_form(ma) - canonical_form(mb)).cwiseAbs().maxCoeff());
      ++r.cases;
    }
  }
  r.passed = r.worst < tol::canonical_form;
  r.detail = "max entry deviation between canonicalized mean states";
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"duality", "stability", "clt", "max-entropy",
                                                 "clifford-covariance"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  static const std::map<std::string, SuiteResult (*)(std::uint64_t)> registry = {
      {"duality", &verify_duality},
      {"stability", &verify_stability},
      {"clt", &verify_clt},
      {"max-entropy", &verify_max_entropy},
      {"clifford-covariance", &verify_clifford_covariance}};
  const auto it = registry.find(name);
  if (it == registry.end()) {
    throw std::invalid_argument("unknown verification suite \"" + name + "\"");
  }
  return it->second(seed);
}

}  // namespace magicflow
