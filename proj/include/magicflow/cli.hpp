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

// Command-line surface.
//
//   magicflow build-state <kind> --d --n [--k --seed --depth --in] --out
//   magicflow run-cg --in [--L --s --t --mode --trace] --out
//   magicflow classify --in [--L --s --t --mode --out]
//   magicflow verify <suite> [--seed]
//   magicflow report --in
//
// Exit codes: 0 success (verdicts agree), 1 mathematical failure
// (disagreement, invalid state, unsupported configuration), 2 usage error.
// Every randomized choice flows from --seed; identical invocations produce
// byte-identical outputs.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "magicflow/io.hpp"
#include "magicflow/states.hpp"
#include "magicflow/verify.hpp"

namespace magicflow {

struct RunConfig {
  int d = 2;
  int n = 1;
  int k = 0;
  std::optional<int> s;
  std::optional<int> t;
  std::optional<int> steps;  // --L
  std::uint64_t seed = 0;
  int depth = 24;
  std::string kind;
  std::string suite;
  std::string in_path;
  std::string out_path;
  std::string trace_path;
  std::string mode = "auto";  // dense | char | auto
};

namespace detail {

inline std::optional<ConvParams> params_override(const RunConfig& cfg, int d) {
  if (cfg.s.has_value() != cfg.t.has_value()) {
    throw std::invalid_argument("--s and --t must be given together");
  }
  if (cfg.s) return ConvParams(*cfg.s, *cfg.t, d);
  return std::nullopt;
}

}  // namespace detail

inline int cmd_build_state(const RunConfig& cfg) {
  DensityOperator rho = zeros_state(cfg.n, cfg.d);
  if (cfg.kind == "zeros") {
    // already built
  } else if (cfg.kind == "psi-k") {
    rho = psi_k_state(cfg.n, cfg.d, cfg.k, cfg.seed, cfg.depth);
  } else if (cfg.kind == "random") {
    Rng rng(cfg.seed);
    rho = random_pure_state(cfg.n, cfg.d, rng);
  } else if (cfg.kind == "stabilizer") {
    if (cfg.in_path.empty()) {
      throw CLI::ValidationError("build-state", "kind \"stabilizer\" needs --in <circuit.json>");
    }
    const CliffordCircuit c = load_circuit(cfg.in_path);
    if (c.n != cfg.n || c.d != cfg.d) {
      throw std::invalid_argument("circuit file does not match the requested (n, d)");
    }
    rho = prepare_stabilizer(c);
  } else {
    throw CLI::ValidationError("build-state", "unknown kind \"" + cfg.kind + "\"");
  }
  if (cfg.mode == "char") {
    save_state(cfg.out_path, char_function(rho));
  } else {
    save_state(cfg.out_path, rho);
  }
  std::cout << "wrote " << cfg.out_path << " (" << cfg.kind << ", d=" << cfg.d
            << ", n=" << cfg.n << ")\n";
  return 0;
}

inline int cmd_run_cg(const RunConfig& cfg) {
  const LoadedState st = load_state(cfg.in_path);
  const std::string trace_path =
      cfg.trace_path.empty() ? cfg.out_path + ".trace.csv" : cfg.trace_path;
  const auto params =
      st.d == 2 ? std::nullopt : detail::params_override(cfg, st.d);

  int steps = 0;
  if (cfg.steps) {
    steps = *cfg.steps;
  } else {
    // Default: enough iterations to resolve the class by the entropy
    // margin; stabilizer inputs (zero gap) are already at the fixed point.
    const double gap = magic_gap(st.as_char());
    steps = gap > 0.0 ? required_iterations(st.n, st.d, gap) : 6;
  }

  if (steps == 0) {
    FlowTrace empty;
    empty.n = st.n;
    empty.d = st.d;
    if (params) {
      empty.params = *params;
    } else if (st.d != 2) {
      // no convolution runs at L=0; record the default parameters only
      // where they exist (d = 3, 5 have none)
      try {
        empty.params = default_params(st.d);
      } catch (const no_convolution_params&) {
      }
    }
    if (st.table) {
      save_state(cfg.out_path, *st.table);
    } else {
      save_state(cfg.out_path, *st.dense);
    }
    save_flow_trace(trace_path, empty);
    std::cout << "L=0: input echoed to " << cfg.out_path << ", empty trace at " << trace_path
              << "\n";
    return 0;
  }

  DensityOperator rho = st.as_density();
  DensityOperator final_state = rho;
  FlowTrace trace;
  if (cfg.mode == "dense") {
    rho.validate();
    trace.n = rho.n();
    trace.d = rho.d();
    if (rho.d() != 2) trace.params = params ? *params : default_params(rho.d());
    for (int L = 1; L <= steps; ++L) {
      final_state = self_convolve(final_state, trace.params);
      const CharFunction xi = char_function(final_state);
      FlowStep step;
      step.L = L;
      step.supnorm_gap = detail::supnorm_gap(xi);
      step.entropy = von_neumann_entropy(final_state);
      const double gap_now = 1.0 - detail::largest_subunit(xi, tol::unit_modulus);
      const double keep = 1.0 - std::max(tol::unit_modulus, 0.5 * gap_now);
      step.trace_dist_estimate =
          trace_distance(final_state, inverse_char(detail::threshold_table(xi, keep)));
      trace.steps.push_back(step);
    }
  } else {
    auto [state, t] = iterate(rho, params, steps);
    final_state = std::move(state);
    trace = std::move(t);
  }
  if (st.table && cfg.mode != "dense") {
    save_state(cfg.out_path, char_function(final_state));
  } else {
    save_state(cfg.out_path, final_state);
  }
  save_flow_trace(trace_path, trace);
  std::cout << "ran " << steps << " self-convolution steps; final state at " << cfg.out_path
            << ", trace at " << trace_path << (trace.stalled ? " [gap stalled]" : "") << "\n";
  return 0;
}

inline int cmd_classify(const RunConfig& cfg) {
  const LoadedState st = load_state(cfg.in_path);
  ClassifyOptions opt;
  opt.params = st.d == 2 ? std::nullopt : detail::params_override(cfg, st.d);
  opt.flow_steps = cfg.steps.value_or(0);

  MagicClassReport report;
  try {
    if (cfg.mode == "char" || (cfg.mode == "auto" && st.table)) {
      report = classify_char(st.as_char(), opt);
    } else {
      report = classify(st.as_density(), opt);
    }
  } catch (const verdict_error& e) {
    const auto j = report_to_json(e.report);
    if (!cfg.out_path.empty()) detail::write_text_file(cfg.out_path, j.dump(2) + "\n");
    std::cout << report_summary(e.report) << "\n";
    std::cerr << "classify: " << e.what() << "\n";
    return 1;
  }
  std::cout << report_summary(report) << "\n";
  if (!cfg.out_path.empty()) {
    detail::write_text_file(cfg.out_path, report_to_json(report).dump(2) + "\n");
  } else {
    std::cout << report_to_json(report).dump(2) << "\n";
  }
  return report.verdicts.agree ? 0 : 1;
}

inline int cmd_verify(const RunConfig& cfg) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end()) {
    std::cerr << "unknown suite \"" << cfg.suite << "\"; available:";
    for (const auto& s : names) std::cerr << ' ' << s;
    std::cerr << "\n";
    return 2;
  }
  const SuiteResult result = run_suite(cfg.suite, cfg.seed);
  nlohmann::json j = {{"format_version", kFormatVersion},
                      {"suite", result.name},
                      {"passed", result.passed},
                      {"cases", result.cases},
                      {"worst", result.worst},
                      {"detail", result.detail},
                      {"seed", cfg.seed}};
  std::cout << j.dump() << "\n";
  return result.passed ? 0 : 1;
}

inline int cmd_report(const RunConfig& cfg) {
  const auto j = nlohmann::json::parse(detail::read_text_file(cfg.in_path));
  std::cout << report_summary(report_from_json(j)) << "\n";
  return 0;
}

inline int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"magicflow: magic-class classification of qudit states via the "
               "iterated quantum convolution"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build-state", "Build a state file");
  build->add_option("kind", cfg.kind, "zeros | psi-k | random | stabilizer")->required();
  build->add_option("--d", cfg.d, "qudit dimension (2 or an odd prime)")->required();
  build->add_option("--n", cfg.n, "number of qudits")->required();
  build->add_option("--k", cfg.k, "magic qudits for psi-k");
  build->add_option("--seed", cfg.seed, "seed for every randomized choice");
  build->add_option("--depth", cfg.depth, "Clifford dressing depth (0 = bare product)");
  build->add_option("--in", cfg.in_path, "circuit file for kind=stabilizer");
  build->add_option("--out", cfg.out_path, "output state file")->required();
  build->add_option("--mode", cfg.mode, "output representation: dense (default) or char")
      ->check(CLI::IsMember({"dense", "char", "auto"}));

  auto* run = app.add_subcommand("run-cg", "Iterate the self-convolution flow");
  run->add_option("--in", cfg.in_path, "input state file")->required();
  run->add_option("--out", cfg.out_path, "final state file")->required();
  run->add_option("--trace", cfg.trace_path, "trace CSV path (default: <out>.trace.csv)");
  run->add_option("--L", cfg.steps, "iteration count (default: gap-derived)");
  run->add_option("--s", cfg.s, "convolution parameter s");
  run->add_option("--t", cfg.t, "convolution parameter t");
  run->add_option("--mode", cfg.mode, "dense | char | auto")
      ->check(CLI::IsMember({"dense", "char", "auto"}));

  auto* cls = app.add_subcommand("classify", "Classify a state into its magic class");
  cls->add_option("--in", cfg.in_path, "input state file")->required();
  cls->add_option("--out", cfg.out_path, "report JSON path (default: print to stdout)");
  cls->add_option("--L", cfg.steps, "classify from the L-step flow iterate instead of Xi");
  cls->add_option("--s", cfg.s, "convolution parameter s");
  cls->add_option("--t", cfg.t, "convolution parameter t");
  cls->add_option("--mode", cfg.mode, "dense | char | auto")
      ->check(CLI::IsMember({"dense", "char", "auto"}));

  auto* ver = app.add_subcommand("verify", "Run a named property suite");
  ver->add_option("suite", cfg.suite, "duality | stability | clt | max-entropy | "
                                      "clifford-covariance")
      ->required();
  ver->add_option("--seed", cfg.seed, "corpus seed");

  auto* rep = app.add_subcommand("report", "Summarize a report JSON in one line");
  rep->add_option("--in", cfg.in_path, "report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (build->parsed()) return cmd_build_state(cfg);
    if (run->parsed()) return cmd_run_cg(cfg);
    if (cls->parsed()) return cmd_classify(cfg);
    if (ver->parsed()) return cmd_verify(cfg);
    if (rep->parsed()) return cmd_report(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace magicflow
