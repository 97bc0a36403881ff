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

// File formats.
//
// State file (JSON):   {"format_version": 1, "d", "n", "repr": "dense"|"char",
//                       "data": [[re, im], ...]}
//   dense: row-major d^n × d^n entries; char: d^{2n} values in phase-point
//   index order (p digits then q digits, site 0 most significant).
// Circuit file (JSON): {"format_version": 1, "d", "n", "gates": [...]}
// Report (JSON):       a MagicClassReport with a "format_version" key.
// Flow trace (CSV):    comment header, then L,entropy,supnorm_gap,
//                      trace_dist_estimate rows.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "magicflow/clifford.hpp"
#include "magicflow/convolution.hpp"
#include "magicflow/magic.hpp"
#include "magicflow/operators.hpp"

namespace magicflow {

inline constexpr int kFormatVersion = 1;

namespace detail {

inline nlohmann::json complex_list(const cxd* data, std::int64_t count) {
  nlohmann::json list = nlohmann::json::array();
  for (std::int64_t i = 0; i < count; ++i) {
    list.push_back({data[i].real(), data[i].imag()});
  }
  return list;
}

inline std::vector<cxd> parse_complex_list(const nlohmann::json& list) {
  std::vector<cxd> out;
  out.reserve(list.size());
  for (const auto& pair : list) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("state file: data entries must be [re, im] pairs");
    }
    out.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// States.  Both representations are accepted everywhere.

struct LoadedState {
  int d = 2;
  int n = 1;
  std::string repr;
  std::optional<DensityOperator> dense;
  std::optional<CharFunction> table;

  DensityOperator as_density() const {
    if (dense) return *dense;
    return inverse_char(*table);
  }

  CharFunction as_char() const {
    if (table) return *table;
    return char_function(*dense);
  }
};

inline nlohmann::json state_to_json(const DensityOperator& rho) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["d"] = rho.d();
  j["n"] = rho.n();
  j["repr"] = "dense";
  nlohmann::json list = nlohmann::json::array();
  for (std::int64_t r = 0; r < rho.dim(); ++r) {
    for (std::int64_t c = 0; c < rho.dim(); ++c) {
      list.push_back({rho.matrix()(r, c).real(), rho.matrix()(r, c).imag()});
    }
  }
  j["data"] = std::move(list);
  return j;
}

inline nlohmann::json state_to_json(const CharFunction& xi) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["d"] = xi.d();
  j["n"] = xi.n();
  j["repr"] = "char";
  j["data"] = detail::complex_list(xi.values().data(), xi.table_size());
  return j;
}

inline LoadedState state_from_json(const nlohmann::json& j) {
  for (const char* key : {"d", "n", "repr", "data"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("state file: missing key \"") + key + "\"");
    }
  }
  LoadedState st;
  st.d = j["d"].get<int>();
  st.n = j["n"].get<int>();
  st.repr = j["repr"].get<std::string>();
  require_valid_dimension(st.d);
  if (st.n < 1) throw std::invalid_argument("state file: n must be >= 1");
  const std::vector<cxd> data = detail::parse_complex_list(j["data"]);
  if (st.repr == "dense") {
    const std::int64_t dim = ipow(st.d, st.n);
    if (static_cast<std::int64_t>(data.size()) != dim * dim) {
      throw std::invalid_argument("state file: dense data has wrong length");
    }
    Matrix m(dim, dim);
    for (std::int64_t r = 0; r < dim; ++r) {
      for (std::int64_t c = 0; c < dim; ++c) m(r, c) = data[r * dim + c];
    }
    st.dense = DensityOperator(st.n, st.d, std::move(m));
  } else if (st.repr == "char") {
    CharFunction xi(st.n, st.d, data);
    xi.validate();
    st.table = std::move(xi);
  } else {
    throw std::invalid_argument("state file: repr must be \"dense\" or \"char\"");
  }
  return st;
}

inline void save_state(const std::string& path, const DensityOperator& rho) {
  detail::write_text_file(path, state_to_json(rho).dump(2) + "\n");
}

inline void save_state(const std::string& path, const CharFunction& xi) {
  detail::write_text_file(path, state_to_json(xi).dump(2) + "\n");
}

inline LoadedState load_state(const std::string& path) {
  return state_from_json(nlohmann::json::parse(detail::read_text_file(path)));
}

// ---------------------------------------------------------------------------
// Circuits.

inline nlohmann::json circuit_to_json(const CliffordCircuit& c) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["d"] = c.d;
  j["n"] = c.n;
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.gates) {
    nlohmann::json gj;
    switch (g.kind) {
      case GateKind::Fourier:
        gj = {{"kind", "FOURIER"}, {"site", g.site}};
        break;
      case GateKind::Phase:
        gj = {{"kind", "PHASE"}, {"site", g.site}};
        break;
      case GateKind::Mult:
        gj = {{"kind", "MULT"}, {"site", g.site}, {"a", g.a}};
        break;
      case GateKind::Sum:
        gj = {{"kind", "SUM"}, {"control", g.control}, {"target", g.target}};
        break;
      case GateKind::Weyl:
        gj = {{"kind", "WEYL"}, {"site", g.site}, {"p", g.wp}, {"q", g.wq}};
        break;
    }
    gates.push_back(std::move(gj));
  }
  j["gates"] = std::move(gates);
  return j;
}

inline CliffordCircuit circuit_from_json(const nlohmann::json& j) {
  for (const char* key : {"d", "n", "gates"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("circuit file: missing key \"") + key + "\"");
    }
  }
  CliffordCircuit c(j["n"].get<int>(), j["d"].get<int>());
  for (const auto& gj : j["gates"]) {
    const std::string kind = gj.at("kind").get<std::string>();
    if (kind == "FOURIER") {
      c.append(Gate::fourier(gj.at("site").get<int>()));
    } else if (kind == "PHASE") {
      c.append(Gate::phase(gj.at("site").get<int>()));
    } else if (kind == "MULT") {
      c.append(Gate::mult(gj.at("site").get<int>(), gj.at("a").get<int>()));
    } else if (kind == "SUM") {
      c.append(Gate::sum(gj.at("control").get<int>(), gj.at("target").get<int>()));
    } else if (kind == "WEYL") {
      c.append(Gate::weyl(gj.at("site").get<int>(), gj.at("p").get<int>(),
                          gj.at("q").get<int>()));
    } else {
      throw std::invalid_argument("circuit file: unknown gate kind \"" + kind + "\"");
    }
  }
  return c;
}

inline void save_circuit(const std::string& path, const CliffordCircuit& c) {
  detail::write_text_file(path, circuit_to_json(c).dump(2) + "\n");
}

inline CliffordCircuit load_circuit(const std::string& path) {
  return circuit_from_json(nlohmann::json::parse(detail::read_text_file(path)));
}

// ---------------------------------------------------------------------------
// Reports.

inline nlohmann::json report_to_json(const MagicClassReport& r) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["d"] = r.d;
  j["n"] = r.n;
  j["k"] = r.k;
  j["group_size"] = r.group_size;
  j["symmetry_count"] = r.symmetry_count;
  j["commutant_outside_group"] = r.commutant_outside_group;
  j["commutant_group_quotient"] = r.commutant_group_quotient;
  j["entropy"] = r.entropy;
  j["magic_gap"] = r.magic_gap;
  j["iterations_used"] = r.iterations_used;
  if (r.params) {
    j["params"] = {{"s", r.params->s}, {"t", r.params->t}};
  } else {
    j["params"] = nullptr;
  }
  j["verdicts"] = {{"k_group", r.verdicts.k_group},
                   {"k_symmetry", r.verdicts.k_symmetry},
                   {"k_entropy", r.verdicts.k_entropy},
                   {"agree", r.verdicts.agree}};
  j["pure_state_semantics"] = r.pure_state_semantics;
  j["purity"] = r.purity;
  return j;
}

inline MagicClassReport report_from_json(const nlohmann::json& j) {
  MagicClassReport r;
  r.d = j.at("d").get<int>();
  r.n = j.at("n").get<int>();
  r.k = j.at("k").get<int>();
  r.group_size = j.at("group_size").get<std::int64_t>();
  r.symmetry_count = j.at("symmetry_count").get<std::int64_t>();
  r.commutant_outside_group = j.at("commutant_outside_group").get<std::int64_t>();
  r.commutant_group_quotient = j.at("commutant_group_quotient").get<std::int64_t>();
  r.entropy = j.at("entropy").get<double>();
  r.magic_gap = j.at("magic_gap").get<double>();
  r.iterations_used = j.at("iterations_used").get<int>();
  if (j.contains("params") && !j["params"].is_null()) {
    r.params = ConvParams(j["params"].at("s").get<int>(), j["params"].at("t").get<int>(), r.d);
  }
  r.verdicts.k_group = j.at("verdicts").at("k_group").get<int>();
  r.verdicts.k_symmetry = j.at("verdicts").at("k_symmetry").get<int>();
  r.verdicts.k_entropy = j.at("verdicts").at("k_entropy").get<int>();
  r.verdicts.agree = j.at("verdicts").at("agree").get<bool>();
  r.pure_state_semantics = j.at("pure_state_semantics").get<bool>();
  r.purity = j.at("purity").get<double>();
  return r;
}

inline std::string report_summary(const MagicClassReport& r) {
  std::ostringstream line;
  line << "magic class k=" << r.k << " (d=" << r.d << ", n=" << r.n << "): |G|="
       << r.group_size << ", symmetries=" << r.symmetry_count << ", S(M)="
       << detail::format_double(r.entropy) << ", MG=" << detail::format_double(r.magic_gap)
       << ", verdicts " << (r.verdicts.agree ? "agree" : "DISAGREE");
  if (!r.pure_state_semantics) line << " [mixed input: class semantics are for pure states]";
  return line.str();
}

// ---------------------------------------------------------------------------
// Flow traces.

inline std::string flow_trace_csv(const FlowTrace& t) {
  std::ostringstream out;
  out << "# magicflow-flow-trace format_version=" << kFormatVersion << "\n";
  out << "# d=" << t.d << " n=" << t.n;
  if (t.params) {
    out << " s=" << t.params->s << " t=" << t.params->t;
  } else if (t.d == 2) {
    out << " path=qubit-triple";
  }
  if (t.stalled) out << " stalled=1";
  out << "\n";
  out << "L,entropy,supnorm_gap,trace_dist_estimate\n";
  for (const auto& step : t.steps) {
    out << step.L << ',' << detail::format_double(step.entropy) << ','
        << detail::format_double(step.supnorm_gap) << ','
        << detail::format_double(step.trace_dist_estimate) << "\n";
  }
  return out.str();
}

inline void save_flow_trace(const std::string& path, const FlowTrace& t) {
  detail::write_text_file(path, flow_trace_csv(t));
}

}  // namespace magicflow
