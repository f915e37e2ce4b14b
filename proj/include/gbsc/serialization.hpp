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

#ifndef GBSC_SERIALIZATION_HPP
#define GBSC_SERIALIZATION_HPP

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbsc/circuit.hpp"
#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"
#include "gbsc/pipeline.hpp"

namespace gbsc {

using Json = nlohmann::ordered_json;

namespace detail {

inline void require_keys(const Json& obj, const std::set<std::string>& keys,
                         const std::string& what) {
  if (!obj.is_object()) {
    throw std::invalid_argument(what + ": expected a JSON object");
  }
  for (const auto& k : keys) {
    if (!obj.contains(k)) {
      throw std::invalid_argument(what + ": missing field '" + k + "'");
    }
  }
  for (const auto& item : obj.items()) {
    if (keys.find(item.key()) == keys.end()) {
      throw std::invalid_argument(what + ": unknown field '" + item.key() + "'");
    }
  }
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// -------------------------------------------------------------------------
// Unitary matrices: {"n": N, "re": [[...]], "im": [[...]]}

inline Json unitary_to_json(const UnitaryMatrix& u) {
  const int n = u.dim();
  Json re = Json::array();
  Json im = Json::array();
  for (int r = 0; r < n; ++r) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (int c = 0; c < n; ++c) {
      re_row.push_back(u.matrix()(r, c).real());
      im_row.push_back(u.matrix()(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  Json j;
  j["n"] = n;
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline UnitaryMatrix unitary_from_json(const Json& j) {
  detail::require_keys(j, {"n", "re", "im"}, "unitary");
  if (!j["n"].is_number_integer()) {
    throw std::invalid_argument("unitary: 'n' must be an integer");
  }
  const int n = j["n"].get<int>();
  if (n < 1) throw std::invalid_argument("unitary: 'n' must be positive");
  const Json& re = j["re"];
  const Json& im = j["im"];
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != n ||
      static_cast<int>(im.size()) != n) {
    throw std::invalid_argument("unitary: 're' and 'im' must be n x n arrays");
  }
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const Json& re_row = re[r];
    const Json& im_row = im[r];
    if (!re_row.is_array() || !im_row.is_array() ||
        static_cast<int>(re_row.size()) != n || static_cast<int>(im_row.size()) != n) {
      throw std::invalid_argument("unitary: 're' and 'im' must be n x n arrays");
    }
    for (int c = 0; c < n; ++c) {
      if (!re_row[c].is_number() || !im_row[c].is_number()) {
        throw std::invalid_argument("unitary: entries must be numbers");
      }
      m(r, c) = Complex(re_row[c].get<double>(), im_row[c].get<double>());
    }
  }
  return UnitaryMatrix(std::move(m));
}

// -------------------------------------------------------------------------
// Compiled circuits

inline Json circuit_to_json(const CompiledCircuit& c) {
  Json gates = Json::array();
  for (const MziBlock& g : c.gates) {
    Json jg;
    jg["m"] = g.m;
    jg["n"] = g.n;
    jg["theta"] = g.theta;
    jg["phi"] = g.phi;
    jg["dropped"] = g.dropped;
    gates.push_back(std::move(jg));
  }
  Json j;
  j["n"] = c.n;
  j["device"] = Json{{"rows", c.device.rows}, {"cols", c.device.cols}};
  j["mode"] = c.mode;
  j["input_map"] = c.input_map;
  j["output_map"] = c.output_map;
  j["gates"] = std::move(gates);
  j["final_phases"] = c.final_phases;
  return j;
}

inline CompiledCircuit circuit_from_json(const Json& j) {
  detail::require_keys(
      j, {"n", "device", "mode", "input_map", "output_map", "gates", "final_phases"},
      "circuit");
  CompiledCircuit c;
  if (!j["n"].is_number_integer()) {
    throw std::invalid_argument("circuit: 'n' must be an integer");
  }
  c.n = j["n"].get<int>();
  detail::require_keys(j["device"], {"rows", "cols"}, "circuit device");
  c.device = Lattice{j["device"]["rows"].get<int>(), j["device"]["cols"].get<int>()};
  if (!j["mode"].is_string()) {
    throw std::invalid_argument("circuit: 'mode' must be a string");
  }
  c.mode = j["mode"].get<std::string>();
  parse_compile_mode(c.mode);
  c.input_map = j["input_map"].get<std::vector<int>>();
  c.output_map = j["output_map"].get<std::vector<int>>();
  if (!j["gates"].is_array()) {
    throw std::invalid_argument("circuit: 'gates' must be an array");
  }
  for (const Json& jg : j["gates"]) {
    detail::require_keys(jg, {"m", "n", "theta", "phi", "dropped"}, "circuit gate");
    MziBlock g;
    g.m = jg["m"].get<int>();
    g.n = jg["n"].get<int>();
    g.theta = jg["theta"].get<double>();
    g.phi = jg["phi"].get<double>();
    if (!jg["dropped"].is_boolean()) {
      throw std::invalid_argument("circuit gate: 'dropped' must be a boolean");
    }
    g.dropped = jg["dropped"].get<bool>();
    c.gates.push_back(g);
  }
  c.final_phases = j["final_phases"].get<std::vector<double>>();
  validate_circuit(c);
  return c;
}

// -------------------------------------------------------------------------
// Compile reports

inline Json report_to_json(const CompileReport& r) {
  Json j;
  j["n"] = r.n;
  j["mode"] = r.mode;
  j["device"] = Json{{"rows", r.device.rows}, {"cols", r.device.cols}};
  j["tau"] = r.tau;
  j["bs_total"] = r.counts.bs_total;
  j["bs_kept"] = r.counts.bs_kept;
  j["bs_dropped"] = r.counts.bs_dropped;
  j["ps_count"] = r.counts.ps_count;
  j["pre_dropout_fidelity"] = r.pre_dropout_fidelity;
  j["deterministic_fidelity"] = r.deterministic_fidelity;
  j["theta_cut"] = r.theta_cut;
  j["kept_count"] = r.kept_count;
  j["has_model"] = r.has_model;
  j["power_k"] = r.power_k;
  j["iterations"] = r.iterations;
  j["mean_sampled_fidelity"] = r.mean_sampled_fidelity;
  j["map_k"] = r.map_k;
  j["indicator_value"] = r.indicator_value;
  j["timings"] = Json{{"pattern_s", r.timings.pattern_s},
                      {"mapping_s", r.timings.mapping_s},
                      {"decompose_s", r.timings.decompose_s},
                      {"threshold_s", r.timings.threshold_s},
                      {"calibration_s", r.timings.calibration_s},
                      {"total_s", r.timings.total_s}};
  return j;
}

inline CompileReport report_from_json(const Json& j) {
  detail::require_keys(
      j,
      {"n", "mode", "device", "tau", "bs_total", "bs_kept", "bs_dropped", "ps_count",
       "pre_dropout_fidelity", "deterministic_fidelity", "theta_cut", "kept_count",
       "has_model", "power_k", "iterations", "mean_sampled_fidelity", "map_k",
       "indicator_value", "timings"},
      "report");
  CompileReport r;
  r.n = j["n"].get<int>();
  r.mode = j["mode"].get<std::string>();
  detail::require_keys(j["device"], {"rows", "cols"}, "report device");
  r.device = Lattice{j["device"]["rows"].get<int>(), j["device"]["cols"].get<int>()};
  r.tau = j["tau"].get<double>();
  r.counts.bs_total = j["bs_total"].get<int>();
  r.counts.bs_kept = j["bs_kept"].get<int>();
  r.counts.bs_dropped = j["bs_dropped"].get<int>();
  r.counts.ps_count = j["ps_count"].get<int>();
  r.pre_dropout_fidelity = j["pre_dropout_fidelity"].get<double>();
  r.deterministic_fidelity = j["deterministic_fidelity"].get<double>();
  r.theta_cut = j["theta_cut"].get<double>();
  r.kept_count = j["kept_count"].get<int>();
  r.has_model = j["has_model"].get<bool>();
  r.power_k = j["power_k"].get<int>();
  r.iterations = j["iterations"].get<int>();
  r.mean_sampled_fidelity = j["mean_sampled_fidelity"].get<double>();
  r.map_k = j["map_k"].get<int>();
  r.indicator_value = j["indicator_value"].get<double>();
  detail::require_keys(j["timings"],
                       {"pattern_s", "mapping_s", "decompose_s", "threshold_s",
                        "calibration_s", "total_s"},
                       "report timings");
  r.timings.pattern_s = j["timings"]["pattern_s"].get<double>();
  r.timings.mapping_s = j["timings"]["mapping_s"].get<double>();
  r.timings.decompose_s = j["timings"]["decompose_s"].get<double>();
  r.timings.threshold_s = j["timings"]["threshold_s"].get<double>();
  r.timings.calibration_s = j["timings"]["calibration_s"].get<double>();
  r.timings.total_s = j["timings"]["total_s"].get<double>();
  return r;
}

// -------------------------------------------------------------------------
// Pattern trees (debug output)

inline Json pattern_to_json(const PatternTree& t) {
  Json coords = Json::array();
  for (const Site& s : t.coords) coords.push_back(Json::array({s.row, s.col}));
  Json j;
  j["rows"] = t.device.rows;
  j["cols"] = t.device.cols;
  j["coords"] = std::move(coords);
  j["parent"] = t.parent;
  j["main_path"] = t.main_path;
  j["labeled"] = t.labeled;
  return j;
}

// -------------------------------------------------------------------------
// CSV output

inline std::string histogram_to_csv(const AngleHistogram& hist) {
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  for (size_t i = 0; i < hist.counts.size(); ++i) {
    out << detail::format_double(hist.edges[i]) << ','
        << detail::format_double(hist.edges[i + 1]) << ',' << hist.counts[i] << '\n';
  }
  return out.str();
}

inline std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "n,repeats,mean_drop_pct,mean_pre_fidelity,mean_det_fidelity,"
         "mean_decompose_s,mean_total_s\n";
  for (const BenchRow& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.4f,%.9f,%.9f,%.6f,%.6f\n", r.n, r.repeats,
                  r.mean_drop_pct, r.mean_pre_fidelity, r.mean_det_fidelity,
                  r.mean_decompose_s, r.mean_total_s);
    out << buf;
  }
  return out.str();
}

// -------------------------------------------------------------------------
// File helpers

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::invalid_argument("write to '" + path + "' failed");
}

inline void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline UnitaryMatrix read_unitary_file(const std::string& path) {
  try {
    return unitary_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void write_unitary_file(const std::string& path, const UnitaryMatrix& u) {
  write_json_file(path, unitary_to_json(u));
}

inline CompiledCircuit read_circuit_file(const std::string& path) {
  try {
    return circuit_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void write_circuit_file(const std::string& path, const CompiledCircuit& c) {
  write_json_file(path, circuit_to_json(c));
}

inline CompileReport read_report_file(const std::string& path) {
  try {
    return report_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void write_report_file(const std::string& path, const CompileReport& r) {
  write_json_file(path, report_to_json(r));
}

}  // namespace gbsc

#endif  // GBSC_SERIALIZATION_HPP
