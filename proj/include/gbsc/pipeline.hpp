// Copyright 2026 The gbsc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GBSC_PIPELINE_HPP
#define GBSC_PIPELINE_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gbsc/circuit.hpp"
#include "gbsc/dropout.hpp"
#include "gbsc/elimination.hpp"
#include "gbsc/lattice.hpp"
#include "gbsc/mapping.hpp"
#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"

namespace gbsc {

/// baseline    chain pattern, every beamsplitter kept
/// rot-cut     chain pattern, deterministic dropout at the fidelity threshold
/// decomp-opt  zigzag pattern tree, deterministic dropout
/// full-opt    zigzag pattern tree, qumode mapping, dropout with sampling model
enum class CompileMode { kBaseline, kRotCut, kDecompOpt, kFullOpt };

inline CompileMode parse_compile_mode(const std::string& name) {
  if (name == "baseline") return CompileMode::kBaseline;
  if (name == "rot-cut") return CompileMode::kRotCut;
  if (name == "decomp-opt") return CompileMode::kDecompOpt;
  if (name == "full-opt") return CompileMode::kFullOpt;
  throw std::invalid_argument(
      "unknown mode '" + name +
      "' (expected baseline, rot-cut, decomp-opt, or full-opt)");
}

inline std::string compile_mode_name(CompileMode mode) {
  switch (mode) {
    case CompileMode::kBaseline: return "baseline";
    case CompileMode::kRotCut: return "rot-cut";
    case CompileMode::kDecompOpt: return "decomp-opt";
    case CompileMode::kFullOpt: return "full-opt";
  }
  throw std::invalid_argument("unknown compile mode");
}

inline std::vector<int> default_map_k_candidates(int n) {
  std::vector<int> ks{n / 3, n / 2, (2 * n) / 3};
  for (int& k : ks) k = std::clamp(k, 1, n);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

inline std::vector<int> default_power_k_candidates() {
  return {1, 2, 5, 10, 20, 50, 100};
}

inline int default_refine_trials(int n) { return std::max(2000, 40 * n); }

struct CompileOptions {
  Lattice device{1, 1};
  CompileMode mode = CompileMode::kFullOpt;
  double tau = 0.999;
  std::vector<int> map_k_candidates;    // empty: n/3, n/2, 2n/3
  std::vector<int> power_k_candidates;  // empty: 1, 2, 5, 10, 20, 50, 100
  int refine_trials = -1;               // negative: max(2000, 40 n); 0 disables
  int iterations = 50;
  uint64_t seed = 1;
};

struct CompileTimings {
  double pattern_s = 0.0;
  double mapping_s = 0.0;
  double decompose_s = 0.0;
  double threshold_s = 0.0;
  double calibration_s = 0.0;
  double total_s = 0.0;
};

struct CompileReport {
  int n = 0;
  std::string mode;
  Lattice device{1, 1};
  double tau = 0.0;
  GateCounts counts;
  double pre_dropout_fidelity = 0.0;    // exact reconstruction vs the compile target
  double deterministic_fidelity = 0.0;  // after the deterministic cut
  double theta_cut = 0.0;
  int kept_count = 0;
  bool has_model = false;
  int power_k = 0;
  int iterations = 0;
  double mean_sampled_fidelity = 0.0;
  int map_k = 0;  // 0 when the identity mapping was used
  double indicator_value = 0.0;
  CompileTimings timings;
};

struct CompileResult {
  CompiledCircuit circuit;
  CompileReport report;
  Decomposition decomposition;
  PatternTree tree;
  PermutationPair perms;
  DropoutModel model;  // meaningful only when report.has_model
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline CompileResult compile_unitary(const UnitaryMatrix& u, const CompileOptions& opts) {
  const int n = u.dim();
  if (n < 2) {
    throw std::invalid_argument("compile_unitary: need at least two qumodes");
  }
  if (opts.device.node_count() < n) {
    throw std::invalid_argument(
        "compile_unitary: device " + std::to_string(opts.device.rows) + "x" +
        std::to_string(opts.device.cols) + " has fewer than " + std::to_string(n) +
        " sites");
  }
  if (opts.mode != CompileMode::kBaseline && !(opts.tau > 0.0 && opts.tau < 1.0)) {
    throw std::invalid_argument("compile_unitary: tau must lie in (0, 1)");
  }
  if (opts.iterations < 1) {
    throw std::invalid_argument("compile_unitary: iterations must be at least 1");
  }

  const auto t_total = std::chrono::steady_clock::now();
  CompileResult result;
  CompileReport& report = result.report;
  report.n = n;
  report.mode = compile_mode_name(opts.mode);
  report.device = opts.device;
  report.tau = opts.tau;
  report.iterations = opts.iterations;

  const bool uses_tree =
      opts.mode == CompileMode::kDecompOpt || opts.mode == CompileMode::kFullOpt;

  auto t0 = std::chrono::steady_clock::now();
  result.tree = uses_tree ? select_subpattern(bfs_label(zigzag_embed(opts.device)), n)
                          : chain_on_device(opts.device, n);
  EliminationPlan plan = build_plan(result.tree);
  report.timings.pattern_s = detail::seconds_since(t0);

  result.perms = identity_permutations(n);
  UnitaryMatrix target = u;
  bool mapped = false;
  if (opts.mode == CompileMode::kFullOpt) {
    t0 = std::chrono::steady_clock::now();
    RegionPartition partition = partition_columns(result.tree);
    std::vector<int> map_ks =
        opts.map_k_candidates.empty() ? default_map_k_candidates(n) : opts.map_k_candidates;
    for (int k : map_ks) {
      if (k < 1 || k > n) {
        throw std::invalid_argument("compile_unitary: map_k candidates must lie in [1, n]");
      }
    }
    MappingResult mapping = select_map_k(u, partition, plan, map_ks);
    result.perms = mapping.perms;
    target = mapping.permuted;
    const int refine_trials =
        opts.refine_trials < 0 ? default_refine_trials(n) : opts.refine_trials;
    if (refine_trials > 0) {
      RefinementResult refined =
          refine_mapping(mapping.permuted, plan, opts.tau,
                         substream_seed(opts.seed, 3), refine_trials);
      std::vector<int> base_col_gather = inverse_permutation(mapping.perms.col_perm);
      std::vector<int> row_gather(n), col_gather(n);
      for (int i = 0; i < n; ++i) {
        row_gather[i] = mapping.perms.row_perm[refined.row_source[i]];
        col_gather[i] = base_col_gather[refined.col_source[i]];
      }
      result.perms = PermutationPair{std::move(row_gather),
                                     inverse_permutation(col_gather)};
      target = std::move(refined.permuted);
    }
    mapped = true;
    report.map_k = mapping.map_k;
    report.indicator_value = mapping.indicator_value;
    report.timings.mapping_s = detail::seconds_since(t0);
  }

  t0 = std::chrono::steady_clock::now();
  result.decomposition = decompose(target, plan);
  report.timings.decompose_s = detail::seconds_since(t0);

  report.pre_dropout_fidelity =
      fidelity(reconstruct(result.decomposition), target);

  const int total_blocks = static_cast<int>(result.decomposition.blocks.size());
  std::vector<bool> keep(total_blocks, true);
  ThresholdResult threshold{0.0, total_blocks};
  report.deterministic_fidelity = report.pre_dropout_fidelity;

  if (opts.mode != CompileMode::kBaseline) {
    t0 = std::chrono::steady_clock::now();
    threshold = find_threshold(result.decomposition, target, opts.tau);
    if (mapped) {
      // The mapping is kept only when it drops at least as many blocks as
      // the identity mapping on the same pattern tree.
      Decomposition plain = decompose(u, plan);
      ThresholdResult plain_threshold = find_threshold(plain, u, opts.tau);
      if (plain_threshold.kept_count < threshold.kept_count) {
        result.perms = identity_permutations(n);
        target = u;
        result.decomposition = std::move(plain);
        threshold = plain_threshold;
        mapped = false;
        report.map_k = 0;
        report.indicator_value = 0.0;
        report.pre_dropout_fidelity =
            fidelity(reconstruct(result.decomposition), target);
      }
    }
    report.timings.threshold_s = detail::seconds_since(t0);
    keep = deterministic_cut(result.decomposition, threshold.theta_cut);
    report.deterministic_fidelity =
        fidelity(reconstruct(result.decomposition, keep), target);
  }
  report.theta_cut = threshold.theta_cut;
  report.kept_count = threshold.kept_count;

  if (opts.mode == CompileMode::kFullOpt && threshold.theta_cut > 0.0) {
    bool any_rotation = false;
    for (const MziBlock& b : result.decomposition.blocks) {
      if (b.theta != 0.0) {
        any_rotation = true;
        break;
      }
    }
    if (any_rotation) {
      t0 = std::chrono::steady_clock::now();
      std::vector<int> power_ks = opts.power_k_candidates.empty()
                                      ? default_power_k_candidates()
                                      : opts.power_k_candidates;
      result.model = select_power_k(result.decomposition, target, opts.tau, threshold,
                                    power_ks, opts.iterations,
                                    substream_seed(opts.seed, 2));
      report.has_model = true;
      report.power_k = result.model.power_k;
      report.mean_sampled_fidelity = result.model.mean_fidelity;
      report.timings.calibration_s = detail::seconds_since(t0);
    }
  }

  CompiledCircuit& circuit = result.circuit;
  circuit.n = n;
  circuit.device = opts.device;
  circuit.mode = report.mode;
  RelabelRecords records = relabel_records(result.perms);
  circuit.input_map = records.input_map;
  circuit.output_map = records.output_map;
  circuit.gates = result.decomposition.blocks;
  for (int i = 0; i < total_blocks; ++i) circuit.gates[i].dropped = !keep[i];
  circuit.final_phases = result.decomposition.final_phases;
  validate_circuit(circuit);

  report.counts = gate_counts(circuit);
  report.timings.total_s = detail::seconds_since(t_total);
  return result;
}

struct BenchRow {
  int n = 0;
  int repeats = 0;
  double mean_drop_pct = 0.0;
  double mean_pre_fidelity = 0.0;
  double mean_det_fidelity = 0.0;
  double mean_decompose_s = 0.0;
  double mean_total_s = 0.0;
};

/// Compiles `repeats` Haar-random unitaries per size in full-opt mode on a
/// 3-row device wide enough to hold n qumodes, and averages drop rate,
/// fidelity, and timing.
inline std::vector<BenchRow> run_bench(const std::vector<int>& sizes, double tau,
                                       int repeats, uint64_t seed) {
  if (repeats < 1) {
    throw std::invalid_argument("run_bench: repeats must be at least 1");
  }
  std::vector<BenchRow> rows;
  for (int n : sizes) {
    if (n < 2) throw std::invalid_argument("run_bench: sizes must be at least 2");
    BenchRow row;
    row.n = n;
    row.repeats = repeats;
    CompileOptions opts;
    opts.device = Lattice{3, (n + 2) / 3};
    opts.mode = CompileMode::kFullOpt;
    opts.tau = tau;
    for (int rep = 0; rep < repeats; ++rep) {
      UnitaryMatrix u = haar_random_unitary(
          n, substream_seed(seed, static_cast<uint64_t>(n), static_cast<uint64_t>(rep)));
      opts.seed = substream_seed(seed, static_cast<uint64_t>(n),
                                 static_cast<uint64_t>(rep) + 0x10000);
      CompileResult r = compile_unitary(u, opts);
      row.mean_drop_pct +=
          100.0 * r.report.counts.bs_dropped / std::max(1, r.report.counts.bs_total);
      row.mean_pre_fidelity += r.report.pre_dropout_fidelity;
      row.mean_det_fidelity += r.report.deterministic_fidelity;
      row.mean_decompose_s += r.report.timings.decompose_s;
      row.mean_total_s += r.report.timings.total_s;
    }
    row.mean_drop_pct /= repeats;
    row.mean_pre_fidelity /= repeats;
    row.mean_det_fidelity /= repeats;
    row.mean_decompose_s /= repeats;
    row.mean_total_s /= repeats;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gbsc

#endif  // GBSC_PIPELINE_HPP
