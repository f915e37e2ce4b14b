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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbsc/gbsc.hpp"

namespace {

struct GenArgs {
  int n = 0;
  uint64_t seed = 1;
  std::string out;
};

struct CompileArgs {
  std::string input;
  std::string device;
  std::string mode = "full-opt";
  double tau = 0.999;
  uint64_t seed = 1;
  std::vector<int> map_k;
  std::vector<int> power_k;
  int refine_trials = -1;
  int iterations = 50;
  std::string out;
  std::string report;
  std::string hist;
  std::string pattern;
};

struct VerifyArgs {
  std::string input;
  std::string circuit;
  double assert_tau = 0.0;
  bool pre_dropout = false;
};

struct SampleArgs {
  std::string circuit;
  std::string report;
  int shots = 1;
  uint64_t seed = 1;
  std::string out;
};

struct AnalyzeArgs {
  std::string circuit;
  int bins = 50;
  std::string out;
};

struct BenchArgs {
  std::vector<int> sizes;
  double tau = 0.95;
  int repeats = 5;
  uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenArgs& a) {
  gbsc::UnitaryMatrix u = gbsc::haar_random_unitary(a.n, a.seed);
  gbsc::write_unitary_file(a.out, u);
  std::printf("wrote %dx%d Haar-random unitary to %s\n", a.n, a.n, a.out.c_str());
  return 0;
}

int run_compile(const CompileArgs& a) {
  gbsc::UnitaryMatrix u = gbsc::read_unitary_file(a.input);
  gbsc::CompileOptions opts;
  opts.device = gbsc::parse_device_spec(a.device);
  opts.mode = gbsc::parse_compile_mode(a.mode);
  opts.tau = a.tau;
  opts.seed = a.seed;
  opts.map_k_candidates = a.map_k;
  opts.power_k_candidates = a.power_k;
  opts.refine_trials = a.refine_trials;
  opts.iterations = a.iterations;

  gbsc::CompileResult result = gbsc::compile_unitary(u, opts);
  const gbsc::CompileReport& r = result.report;

  if (!a.out.empty()) gbsc::write_circuit_file(a.out, result.circuit);
  if (!a.report.empty()) gbsc::write_report_file(a.report, r);
  if (!a.hist.empty()) {
    gbsc::AngleHistogram hist = gbsc::angle_histogram(
        result.circuit.gates, gbsc::default_angle_bin_edges());
    gbsc::write_text_file(a.hist, gbsc::histogram_to_csv(hist));
  }
  if (!a.pattern.empty()) {
    gbsc::write_json_file(a.pattern, gbsc::pattern_to_json(result.tree));
  }

  std::printf("compiled n=%d mode=%s device=%dx%d\n", r.n, r.mode.c_str(),
              r.device.rows, r.device.cols);
  std::printf("beamsplitters kept %d of %d (%.2f%% dropped)\n", r.counts.bs_kept,
              r.counts.bs_total,
              100.0 * r.counts.bs_dropped / std::max(1, r.counts.bs_total));
  std::printf("phase shifters %d\n", r.counts.ps_count);
  std::printf("pre-dropout fidelity %.12f\n", r.pre_dropout_fidelity);
  std::printf("deterministic fidelity %.12f (tau %.6g, theta_cut %.6g)\n",
              r.deterministic_fidelity, r.tau, r.theta_cut);
  if (r.map_k > 0) {
    std::printf("mapping map_k=%d indicator %.6f\n", r.map_k, r.indicator_value);
  }
  if (r.has_model) {
    std::printf("sampling model power_k=%d mean fidelity %.12f over %d draws\n",
                r.power_k, r.mean_sampled_fidelity, r.iterations);
  }
  std::printf("total %.3fs (decompose %.3fs)\n", r.timings.total_s,
              r.timings.decompose_s);
  return 0;
}

int run_verify(const VerifyArgs& a, bool has_assert) {
  gbsc::UnitaryMatrix u = gbsc::read_unitary_file(a.input);
  gbsc::CompiledCircuit c = gbsc::read_circuit_file(a.circuit);
  gbsc::UnitaryMatrix logical = gbsc::logical_unitary(c, !a.pre_dropout);
  double f = gbsc::fidelity(logical, u);
  gbsc::GateCounts counts = gbsc::gate_counts(c);
  std::printf("fidelity %.17g\n", f);
  std::printf("beamsplitters kept %d of %d%s\n", counts.bs_kept, counts.bs_total,
              a.pre_dropout ? " (dropped flags ignored)" : "");
  if (has_assert && f < a.assert_tau) {
    std::fprintf(stderr, "FAIL: fidelity %.17g below threshold %.17g\n", f,
                 a.assert_tau);
    return 3;
  }
  return 0;
}

int run_sample(const SampleArgs& a) {
  if (a.shots < 0) throw std::invalid_argument("--shots must be nonnegative");
  gbsc::CompiledCircuit c = gbsc::read_circuit_file(a.circuit);
  gbsc::CompileReport r = gbsc::read_report_file(a.report);
  if (!r.has_model || r.power_k < 1 || !(r.theta_cut > 0.0)) {
    throw std::invalid_argument(
        "report carries no sampling model; compile with --mode full-opt");
  }
  std::vector<double> thetas(c.gates.size());
  for (size_t i = 0; i < c.gates.size(); ++i) thetas[i] = c.gates[i].theta;
  gbsc::BlockDistribution dist =
      gbsc::build_distribution(thetas, r.theta_cut, r.power_k);

  for (int shot = 0; shot < a.shots; ++shot) {
    std::mt19937_64 rng(gbsc::substream_seed(a.seed, static_cast<uint64_t>(shot)));
    std::vector<bool> keep =
        gbsc::sample_weighted_subset(dist.log_weights, r.kept_count, rng);
    gbsc::CompiledCircuit sampled = c;
    for (size_t i = 0; i < sampled.gates.size(); ++i) {
      sampled.gates[i].dropped = !keep[i];
    }
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%04d", shot);
    gbsc::write_circuit_file(a.out + suffix + ".json", sampled);
  }
  std::printf("wrote %d sampled circuits to %s*.json (kept %d of %zu gates each)\n",
              a.shots, a.out.c_str(), r.kept_count, c.gates.size());
  return 0;
}

int run_analyze(const AnalyzeArgs& a) {
  gbsc::CompiledCircuit c = gbsc::read_circuit_file(a.circuit);
  gbsc::AngleHistogram hist =
      gbsc::angle_histogram(c.gates, gbsc::default_angle_bin_edges(a.bins));
  std::string csv = gbsc::histogram_to_csv(hist);
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    gbsc::write_text_file(a.out, csv);
    std::printf("wrote %d-bin angle histogram to %s\n", a.bins, a.out.c_str());
  }
  return 0;
}

int run_bench(const BenchArgs& a) {
  std::vector<gbsc::BenchRow> rows =
      gbsc::run_bench(a.sizes, a.tau, a.repeats, a.seed);
  std::string csv = gbsc::bench_to_csv(rows);
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    gbsc::write_text_file(a.out, csv);
    std::fputs(csv.c_str(), stdout);
    std::printf("wrote bench results to %s\n", a.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gbsc: compiles linear interferometer unitaries onto qumode lattices"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-unitary", "Generate a Haar-random unitary");
  gen->add_option("--n", gen_args.n, "Matrix dimension")->required();
  gen->add_option("--seed", gen_args.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_args.out, "Output JSON path")->required();

  CompileArgs compile_args;
  CLI::App* compile = app.add_subcommand("compile", "Compile a unitary to a lattice circuit");
  compile->add_option("--input", compile_args.input, "Unitary JSON path")->required();
  compile->add_option("--device", compile_args.device, "Device size, e.g. 6x6")->required();
  compile->add_option("--mode", compile_args.mode,
                      "baseline | rot-cut | decomp-opt | full-opt")
      ->capture_default_str();
  compile->add_option("--tau", compile_args.tau, "Target fidelity in (0,1)")
      ->capture_default_str();
  compile->add_option("--seed", compile_args.seed, "RNG seed")->capture_default_str();
  compile->add_option("--map-k", compile_args.map_k,
                      "map_k candidates (comma separated)")
      ->delimiter(',');
  compile->add_option("--power-k", compile_args.power_k,
                      "power_k candidates (comma separated)")
      ->delimiter(',');
  compile->add_option("--refine-trials", compile_args.refine_trials,
                      "Mapping refinement trials (negative: auto, 0: off)")
      ->capture_default_str();
  compile->add_option("--iterations", compile_args.iterations,
                      "Sampled reconstructions per power_k candidate")
      ->capture_default_str();
  compile->add_option("--out", compile_args.out, "Circuit JSON path");
  compile->add_option("--report", compile_args.report, "Report JSON path");
  compile->add_option("--hist", compile_args.hist, "Angle histogram CSV path");
  compile->add_option("--pattern", compile_args.pattern, "Pattern tree JSON path");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "Check a circuit against its unitary");
  verify->add_option("--input", verify_args.input, "Unitary JSON path")->required();
  verify->add_option("--circuit", verify_args.circuit, "Circuit JSON path")->required();
  CLI::Option* assert_opt =
      verify->add_option("--assert", verify_args.assert_tau,
                         "Exit with status 3 when fidelity falls below this value");
  verify->add_flag("--pre-dropout", verify_args.pre_dropout,
                   "Ignore dropped flags and verify the exact reconstruction");

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand(
      "sample-circuits", "Draw kept-set samples from a compiled model");
  sample->add_option("--circuit", sample_args.circuit, "Circuit JSON path")->required();
  sample->add_option("--report", sample_args.report, "Report JSON path")->required();
  sample->add_option("--shots", sample_args.shots, "Number of circuits to draw")
      ->capture_default_str();
  sample->add_option("--seed", sample_args.seed, "RNG seed")->capture_default_str();
  sample->add_option("--out", sample_args.out, "Output path prefix")->required();

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand("analyze", "Histogram the rotation angles");
  analyze->add_option("--circuit", analyze_args.circuit, "Circuit JSON path")->required();
  analyze->add_option("--bins", analyze_args.bins, "Histogram bins over [0, pi/2]")
      ->capture_default_str();
  analyze->add_option("--out", analyze_args.out, "CSV path (stdout when omitted)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Compile Haar-random unitaries and report stats");
  bench->add_option("--sizes", bench_args.sizes, "Sizes to run (comma separated)")
      ->required()
      ->delimiter(',');
  bench->add_option("--tau", bench_args.tau, "Target fidelity")->capture_default_str();
  bench->add_option("--repeats", bench_args.repeats, "Unitaries per size")
      ->capture_default_str();
  bench->add_option("--seed", bench_args.seed, "RNG seed")->capture_default_str();
  bench->add_option("--out", bench_args.out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (compile->parsed()) return run_compile(compile_args);
    if (verify->parsed()) return run_verify(verify_args, assert_opt->count() > 0);
    if (sample->parsed()) return run_sample(sample_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
