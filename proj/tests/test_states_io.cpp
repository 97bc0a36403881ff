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
#include <filesystem>

#include "magicflow/io.hpp"
#include "magicflow/states.hpp"

using namespace magicflow;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "magicflow_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("state builders") {
  SECTION("zeros_state is |0...0⟩⟨0...0|") {
    const auto rho = zeros_state(2, 3);
    CHECK(std::abs(rho.matrix()(0, 0) - cxd(1, 0)) < 1e-15);
    CHECK(rho.matrix().cwiseAbs().sum() == Approx(1.0));
  }
  SECTION("magic_state_vector") {
    const auto odd = magic_state_vector(7);
    CHECK(std::abs(odd(0) - cxd(1 / std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(odd(1) - cxd(1 / std::sqrt(2.0), 0)) < 1e-15);
    for (int j = 2; j < 7; ++j) CHECK(std::abs(odd(j)) == 0.0);
    const auto qubit = magic_state_vector(2);
    CHECK(std::abs(qubit(1) - std::polar(1 / std::sqrt(2.0), M_PI / 4)) < 1e-15);
  }
  SECTION("psi_k is deterministic in the seed") {
    const auto a = psi_k_state(3, 2, 2, 77);
    const auto b = psi_k_state(3, 2, 2, 77);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);
    const auto c = psi_k_state(3, 2, 2, 78);
    CHECK((a.matrix() - c.matrix()).cwiseAbs().maxCoeff() > 1e-6);
  }
  SECTION("psi_k with depth 0 is the bare product state") {
    const auto rho = psi_k_state(2, 7, 1, 0, 0);
    // site 0 magic, site 1 zero: support on |00⟩ and |10⟩ only
    CHECK(std::abs(rho.matrix()(0, 0) - cxd(0.5, 0)) < 1e-12);
    CHECK(std::abs(rho.matrix()(7, 7) - cxd(0.5, 0)) < 1e-12);
    CHECK(rho.purity() == Approx(1.0).margin(1e-10));
  }
  SECTION("psi_k validates k") {
    CHECK_THROWS_AS(psi_k_state(2, 7, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(psi_k_state(2, 7, -1, 0), std::invalid_argument);
  }
  SECTION("random states are valid") {
    Rng rng(900);
    const auto pure = random_pure_state(2, 7, rng);
    CHECK(pure.purity() == Approx(1.0).margin(1e-10));
    const auto mixed = random_density(2, 2, rng);
    CHECK_NOTHROW(mixed.validate());
    CHECK(mixed.purity() < 1.0 - 1e-6);
  }
  SECTION("random isotropic subgroups carry d-th-root phases") {
    Rng rng(901);
    for (int rep = 0; rep < 10; ++rep) {
      const auto g = random_isotropic_subgroup(2, 7, 2, rng);
      CHECK(g.rank() == 2);
      for (const auto& phase : g.phases) {
        bool is_root = false;
        for (int j = 0; j < 7; ++j) {
          if (std::abs(phase - std::polar(1.0, 2 * M_PI * j / 7.0)) < 1e-9) is_root = true;
        }
        CHECK(is_root);
      }
    }
  }
}

TEST_CASE("state files round trip") {
  Rng rng(902);
  SECTION("dense representation") {
    const auto rho = random_pure_state(1, 7, rng);
    const auto path = temp_file("dense.json");
    save_state(path.string(), rho);
    const auto loaded = load_state(path.string());
    CHECK(loaded.repr == "dense");
    CHECK(loaded.d == 7);
    CHECK(loaded.n == 1);
    CHECK((loaded.as_density().matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("char representation") {
    const auto rho = random_pure_state(2, 2, rng);
    const auto xi = char_function(rho);
    const auto path = temp_file("char.json");
    save_state(path.string(), xi);
    const auto loaded = load_state(path.string());
    CHECK(loaded.repr == "char");
    const auto back = loaded.as_char();
    for (std::int64_t i = 0; i < xi.table_size(); ++i) {
      CHECK(std::abs(back[i] - xi[i]) < 1e-15);
    }
    // and the dense view reconstructs the state
    CHECK((loaded.as_density().matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("missing keys and bad repr are rejected") {
    CHECK_THROWS_WITH(state_from_json(nlohmann::json{{"d", 2}, {"n", 1}}),
                      Catch::Contains("missing key"));
    nlohmann::json j = state_to_json(zeros_state(1, 2));
    j["repr"] = "sparse";
    CHECK_THROWS_WITH(state_from_json(j), Catch::Contains("repr"));
  }
  SECTION("a corrupted char table is rejected on load") {
    nlohmann::json j = state_to_json(char_function(zeros_state(1, 2)));
    j["data"][0] = {0.2, 0.0};  // zero-point value must be 1
    CHECK_THROWS_AS(state_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("circuit files round trip") {
  Rng rng(903);
  const auto circuit = random_clifford(2, 7, 18, rng.next_u64());
  const auto path = temp_file("circuit.json");
  save_circuit(path.string(), circuit);
  const auto loaded = load_circuit(path.string());
  REQUIRE(loaded.gates.size() == circuit.gates.size());
  CHECK((circuit_unitary(loaded) - circuit_unitary(circuit)).cwiseAbs().maxCoeff() == 0.0);
  SECTION("unknown gate kinds are rejected") {
    nlohmann::json j = circuit_to_json(circuit);
    j["gates"][0] = {{"kind", "TOFFOLI"}, {"site", 0}};
    CHECK_THROWS_WITH(circuit_from_json(j), Catch::Contains("unknown gate kind"));
  }
}

TEST_CASE("report serialization") {
  const auto report = classify(psi_k_state(2, 7, 1, 5));
  const auto j = report_to_json(report);
  CHECK(j["format_version"] == kFormatVersion);
  const auto back = report_from_json(j);
  CHECK(back.k == report.k);
  CHECK(back.group_size == report.group_size);
  CHECK(back.symmetry_count == report.symmetry_count);
  CHECK(back.entropy == report.entropy);
  CHECK(back.verdicts.agree == report.verdicts.agree);
  CHECK(report_summary(back) == report_summary(report));
  CHECK_THAT(report_summary(report), Catch::Contains("magic class k=1"));
}

TEST_CASE("flow trace CSV") {
  const auto rho = DensityOperator::from_pure(1, 7, magic_state_vector(7));
  auto [state, trace] = iterate(rho, std::nullopt, 3);
  const std::string csv = flow_trace_csv(trace);
  CHECK_THAT(csv, Catch::Contains("format_version=1"));
  CHECK_THAT(csv, Catch::Contains("d=7 n=1 s=2 t=2"));
  CHECK_THAT(csv, Catch::Contains("L,entropy,supnorm_gap,trace_dist_estimate"));
  // header (2 comments + 1 column line) + 3 rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
