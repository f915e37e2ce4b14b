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

#ifndef GBSC_CIRCUIT_HPP
#define GBSC_CIRCUIT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbsc/elimination.hpp"
#include "gbsc/lattice.hpp"
#include "gbsc/matrix.hpp"

namespace gbsc {

/// A lattice-ready program: MZI gates in application order plus the
/// relabelling records that absorb the zero-cost permutations. Gate i acts
/// on physical qumodes (gates[i].m, gates[i].n); dropped gates keep their
/// phase shifter but lose the beamsplitter (theta treated as 0).
struct CompiledCircuit {
  int n = 0;
  Lattice device{1, 1};
  std::string mode;
  std::vector<int> input_map;   // logical input i enters on physical qumode input_map[i]
  std::vector<int> output_map;  // physical output i carries logical output output_map[i]
  std::vector<MziBlock> gates;
  std::vector<double> final_phases;
};

inline void validate_circuit(const CompiledCircuit& c) {
  if (c.n < 1) throw std::invalid_argument("circuit: n must be positive");
  if (!is_permutation(c.input_map) || static_cast<int>(c.input_map.size()) != c.n) {
    throw std::invalid_argument("circuit: input_map is not a permutation of 0..n-1");
  }
  if (!is_permutation(c.output_map) || static_cast<int>(c.output_map.size()) != c.n) {
    throw std::invalid_argument("circuit: output_map is not a permutation of 0..n-1");
  }
  if (static_cast<int>(c.final_phases.size()) != c.n) {
    throw std::invalid_argument("circuit: final_phases must hold one angle per qumode");
  }
  if (c.device.node_count() < c.n) {
    throw std::invalid_argument("circuit: device has fewer sites than qumodes");
  }
  for (const MziBlock& g : c.gates) {
    if (g.m < 0 || g.m >= c.n || g.n < 0 || g.n >= c.n || g.m == g.n) {
      throw std::invalid_argument("circuit: gate indices out of range");
    }
    if (!std::isfinite(g.theta) || !std::isfinite(g.phi)) {
      throw std::invalid_argument("circuit: gate angles must be finite");
    }
  }
}

struct GateCounts {
  int bs_total = 0;    // beamsplitters before dropout
  int bs_kept = 0;     // beamsplitters surviving dropout
  int bs_dropped = 0;
  int ps_count = 0;    // phase shifters: one per gate plus the final layer
};

inline GateCounts gate_counts(const CompiledCircuit& c) {
  GateCounts counts;
  counts.bs_total = static_cast<int>(c.gates.size());
  for (const MziBlock& g : c.gates) {
    if (!g.dropped) ++counts.bs_kept;
  }
  counts.bs_dropped = counts.bs_total - counts.bs_kept;
  counts.ps_count = counts.bs_total + c.n;
  return counts;
}

/// Physical transfer matrix of the circuit: gates applied in order, then the
/// final phase layer. With honor_dropped=false the dropped flags are ignored
/// and every beamsplitter acts, which recovers the pre-dropout unitary.
inline UnitaryMatrix circuit_unitary(const CompiledCircuit& c,
                                     bool honor_dropped = true) {
  validate_circuit(c);
  Matrix w = identity_unitary(c.n).matrix();
  for (const MziBlock& g : c.gates) {
    MziBlock eff = g;
    if (!honor_dropped) eff.dropped = false;
    apply_block(w, eff);
  }
  for (int r = 0; r < c.n; ++r) {
    w.row(r) *= std::exp(Complex(0.0, c.final_phases[r]));
  }
  return UnitaryMatrix(std::move(w));
}

/// Transfer matrix in the logical basis: undoes the relabelling records, so
/// for an exact compilation this reproduces the source unitary bit for bit.
inline UnitaryMatrix logical_unitary(const CompiledCircuit& c,
                                     bool honor_dropped = true) {
  UnitaryMatrix physical = circuit_unitary(c, honor_dropped);
  PermutationPair p{c.output_map, c.input_map};
  return apply_permutations(physical, inverse(p));
}

struct AngleHistogram {
  std::vector<double> edges;   // bin i covers [edges[i], edges[i+1])
  std::vector<long> counts;
};

/// Uniform bin edges over [0, pi/2], the full range of |theta|.
inline std::vector<double> default_angle_bin_edges(int bins = 50) {
  if (bins < 1) throw std::invalid_argument("angle histogram needs at least one bin");
  std::vector<double> edges(bins + 1);
  const double hi = std::numbers::pi / 2.0;
  for (int i = 0; i <= bins; ++i) edges[i] = hi * i / bins;
  return edges;
}

inline AngleHistogram angle_histogram(const std::vector<MziBlock>& gates,
                                      std::vector<double> edges) {
  if (edges.size() < 2) {
    throw std::invalid_argument("angle histogram needs at least two edges");
  }
  AngleHistogram hist;
  hist.edges = std::move(edges);
  hist.counts.assign(hist.edges.size() - 1, 0);
  for (const MziBlock& g : gates) {
    double mag = std::abs(g.theta);
    auto it = std::upper_bound(hist.edges.begin(), hist.edges.end(), mag);
    long bin = static_cast<long>(it - hist.edges.begin()) - 1;
    if (bin < 0) bin = 0;
    if (bin >= static_cast<long>(hist.counts.size())) {
      bin = static_cast<long>(hist.counts.size()) - 1;
    }
    ++hist.counts[bin];
  }
  return hist;
}

}  // namespace gbsc

#endif  // GBSC_CIRCUIT_HPP
