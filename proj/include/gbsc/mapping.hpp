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

#ifndef GBSC_MAPPING_HPP
#define GBSC_MAPPING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gbsc/elimination.hpp"
#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"

namespace gbsc {

/// Columns of the unitary grouped by where their pattern node sits: region 0
/// holds the main-path columns in path order, then one region per branch
/// (one or two columns each), ordered by attachment position along the main
/// path from the start point.
struct RegionPartition {
  std::vector<std::vector<int>> regions;

  int column_count() const {
    int total = 0;
    for (const auto& r : regions) total += static_cast<int>(r.size());
    return total;
  }
};

inline RegionPartition partition_columns(const PatternTree& tree) {
  if (!tree.labeled) {
    throw std::invalid_argument("partition_columns: tree must be BFS-labeled");
  }
  RegionPartition part;
  part.regions.push_back(tree.main_path);
  auto children = tree.children_lists();
  auto on_path = tree.main_path_mask();
  for (int v : tree.main_path) {
    for (int head : children[v]) {
      if (on_path[head]) continue;
      // One region per branch chain hanging off the main path.
      std::vector<int> region;
      std::vector<int> frontier{head};
      while (!frontier.empty()) {
        int b = frontier.back();
        frontier.pop_back();
        region.push_back(b);
        for (int c : children[b]) frontier.push_back(c);
      }
      std::sort(region.begin(), region.end());
      part.regions.push_back(std::move(region));
    }
  }
  if (part.column_count() != tree.size()) {
    throw std::runtime_error("partition_columns: regions do not cover the pattern");
  }
  return part;
}

/// Sum of squared amplitudes of each row over the given columns.
inline std::vector<double> row_region_weights(const UnitaryMatrix& u,
                                              const std::vector<int>& region) {
  std::vector<double> alpha(u.dim(), 0.0);
  for (int c : region) {
    if (c < 0 || c >= u.dim()) {
      throw std::invalid_argument("row_region_weights: column index out of range");
    }
    for (int j = 0; j < u.dim(); ++j) alpha[j] += std::norm(u.matrix()(j, c));
  }
  return alpha;
}

namespace detail {

inline double kth_largest(std::vector<double> values, int k) {
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end(),
                   std::greater<double>());
  return values[k - 1];
}

inline void validate_partition(const RegionPartition& part, int n) {
  std::vector<bool> seen(n, false);
  for (const auto& region : part.regions) {
    for (int c : region) {
      if (c < 0 || c >= n || seen[c]) {
        throw std::invalid_argument("column partition does not cover 0..n-1 exactly once");
      }
      seen[c] = true;
    }
  }
  if (part.column_count() != n) {
    throw std::invalid_argument("column partition does not cover 0..n-1 exactly once");
  }
}

}  // namespace detail

struct ColumnExchangeResult {
  UnitaryMatrix permuted;
  std::vector<int> col_source;  // column c of `permuted` is column col_source[c] of the input
  double region0_indicator = 0.0;
};

/// Greedy zero-cost column exchange. Regions are processed front to back;
/// for each candidate swap between a column slot of the current region and a
/// slot of any later region, the swap is kept iff the map_k-th largest row
/// weight over the current region strictly increases. One full pass per
/// region.
inline ColumnExchangeResult greedy_column_exchange(const UnitaryMatrix& u,
                                                   const RegionPartition& partition,
                                                   int map_k) {
  const int n = u.dim();
  if (map_k < 1 || map_k > n) {
    throw std::invalid_argument("greedy_column_exchange: map_k must lie in [1, n]");
  }
  detail::validate_partition(partition, n);

  Matrix work = u.matrix();
  Eigen::MatrixXd sq(n, n);
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < n; ++c) sq(j, c) = std::norm(work(j, c));
  }
  std::vector<int> col_source = identity_permutation(n);
  double region0_indicator = 0.0;

  std::vector<double> alpha(n), trial(n);
  for (size_t ri = 0; ri < partition.regions.size(); ++ri) {
    const std::vector<int>& cur = partition.regions[ri];
    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (int c : cur) {
      for (int j = 0; j < n; ++j) alpha[j] += sq(j, c);
    }
    double indicator = detail::kth_largest(alpha, map_k);
    for (size_t rj = ri + 1; rj < partition.regions.size(); ++rj) {
      for (int b : partition.regions[rj]) {
        for (int a : cur) {
          for (int j = 0; j < n; ++j) trial[j] = alpha[j] - sq(j, a) + sq(j, b);
          double candidate = detail::kth_largest(trial, map_k);
          if (candidate > indicator) {
            work.col(a).swap(work.col(b));
            sq.col(a).swap(sq.col(b));
            std::swap(col_source[a], col_source[b]);
            std::swap(alpha, trial);
            indicator = candidate;
          }
        }
      }
    }
    if (ri == 0) region0_indicator = indicator;
  }
  return {UnitaryMatrix(std::move(work)), std::move(col_source), region0_indicator};
}

struct RowReorderResult {
  UnitaryMatrix permuted;
  std::vector<int> row_source;  // row i of `permuted` is row row_source[i] of the input
};

/// Reorders rows by ascending weight over the main-path columns, so the
/// heaviest rows sit at the bottom and are eliminated first.
inline RowReorderResult row_reorder(const UnitaryMatrix& u,
                                    const std::vector<int>& region0) {
  const int n = u.dim();
  std::vector<double> alpha = row_region_weights(u, region0);
  std::vector<int> order = identity_permutation(n);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return alpha[a] < alpha[b]; });
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) out.row(i) = u.matrix().row(order[i]);
  return {UnitaryMatrix(std::move(out)), std::move(order)};
}

struct MappingResult {
  PermutationPair perms;
  UnitaryMatrix permuted;
  int map_k = 0;
  double indicator_value = 0.0;
  int small_angle_count = 0;  // blocks with |theta| < 0.1 in the trial decomposition
};

/// Runs the exchange + row reorder for every map_k candidate, decomposes
/// each permuted unitary, and returns the mapping producing the most blocks
/// with |theta| < 0.1 (ties favour the smaller map_k).
inline MappingResult select_map_k(const UnitaryMatrix& u,
                                  const RegionPartition& partition,
                                  const EliminationPlan& plan,
                                  const std::vector<int>& k_candidates) {
  if (k_candidates.empty()) {
    throw std::invalid_argument("select_map_k: no map_k candidates");
  }
  std::vector<int> candidates = k_candidates;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  std::optional<MappingResult> best;
  for (int k : candidates) {
    ColumnExchangeResult ex = greedy_column_exchange(u, partition, k);
    RowReorderResult rr = row_reorder(ex.permuted, partition.regions[0]);
    Decomposition d = decompose(rr.permuted, plan);
    int count = 0;
    for (const MziBlock& b : d.blocks) {
      if (std::abs(b.theta) < 0.1) ++count;
    }
    if (!best || count > best->small_angle_count) {
      best = MappingResult{
          PermutationPair{rr.row_source, inverse_permutation(ex.col_source)},
          std::move(rr.permuted), k, ex.region0_indicator, count};
    }
  }
  return *best;
}

/// Number of smallest rotations whose summed first-order infidelity costs
/// 2(1 - cos theta) fit inside the budget. With budget = n(1 - tau) this
/// approximates how many blocks a threshold cut at fidelity tau could drop.
inline int droppable_within_budget(const std::vector<double>& thetas,
                                   double budget) {
  std::vector<double> cost;
  cost.reserve(thetas.size());
  for (double t : thetas) cost.push_back(2.0 * (1.0 - std::cos(t)));
  std::sort(cost.begin(), cost.end());
  int count = 0;
  double acc = 0.0;
  for (double c : cost) {
    acc += c;
    if (acc > budget) break;
    ++count;
  }
  return count;
}

struct RefinementResult {
  UnitaryMatrix permuted;
  std::vector<int> row_source;  // gather over the input's rows
  std::vector<int> col_source;  // gather over the input's columns
  int droppable = 0;            // surrogate count for the returned matrix
};

/// Anneals single row and column swaps on top of an existing mapping,
/// maximising droppable_within_budget of the resulting angle spectrum.
/// Swaps stay zero-cost relabellings, so this only re-routes which physical
/// qumode carries which logical index. Stops once target_fraction of the
/// blocks fits in the budget; concentrating more weight past that point
/// buys no further drops at fidelity tau. Deterministic for a given seed.
inline RefinementResult refine_mapping(const UnitaryMatrix& start,
                                       const EliminationPlan& plan,
                                       double tau, std::uint64_t seed,
                                       int trials,
                                       double target_fraction = 0.32) {
  const int n = start.dim();
  const double budget = n * (1.0 - tau);
  const int total = static_cast<int>(plan.steps.size());
  const int target = static_cast<int>(std::lround(target_fraction * total));

  Matrix cur = start.matrix();
  std::vector<int> row_src = identity_permutation(n);
  std::vector<int> col_src = identity_permutation(n);
  int cur_count = droppable_within_budget(elimination_thetas(cur, plan), budget);

  Matrix best = cur;
  std::vector<int> best_rows = row_src;
  std::vector<int> best_cols = col_src;
  int best_count = cur_count;

  if (budget <= 0.0 || total == 0) trials = 0;
  std::mt19937_64 rng(seed);
  auto pick = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int t = 0; t < trials && best_count < target; ++t) {
    const bool row_move = (rng() & 1u) != 0;
    const int a = pick();
    const int b = pick();
    if (a == b) continue;
    if (row_move) {
      cur.row(a).swap(cur.row(b));
    } else {
      cur.col(a).swap(cur.col(b));
    }
    const int cand = droppable_within_budget(elimination_thetas(cur, plan), budget);
    const double temp = 1.5 * (1.0 - static_cast<double>(t) / trials) + 0.02;
    const bool accept =
        cand >= cur_count || unit() < std::exp((cand - cur_count) / temp);
    if (!accept) {
      if (row_move) {
        cur.row(a).swap(cur.row(b));
      } else {
        cur.col(a).swap(cur.col(b));
      }
      continue;
    }
    if (row_move) {
      std::swap(row_src[a], row_src[b]);
    } else {
      std::swap(col_src[a], col_src[b]);
    }
    cur_count = cand;
    if (cur_count > best_count) {
      best = cur;
      best_rows = row_src;
      best_cols = col_src;
      best_count = cur_count;
    }
  }
  return {UnitaryMatrix(std::move(best)), std::move(best_rows),
          std::move(best_cols), best_count};
}

struct RelabelRecords {
  std::vector<int> input_map;   // logical input i is prepared on physical qumode input_map[i]
  std::vector<int> output_map;  // physical output i carries logical output output_map[i]
};

/// Permutations cost nothing on hardware: they become relabelling records.
inline RelabelRecords relabel_records(const PermutationPair& p) {
  return {p.col_perm, p.row_perm};
}

}  // namespace gbsc

#endif  // GBSC_MAPPING_HPP
