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

#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gbsc/elimination.hpp"
#include "gbsc/mapping.hpp"
#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"

namespace {

using gbsc::Lattice;
using gbsc::Matrix;
using gbsc::PatternTree;
using gbsc::RegionPartition;
using gbsc::UnitaryMatrix;

PatternTree labeled_tree(int n) {
  Lattice device{3, (n + 2) / 3};
  return gbsc::select_subpattern(gbsc::bfs_label(gbsc::zigzag_embed(device)), n);
}

// Reference greedy pass, recomputing every weight from scratch each trial.
// Mirrors the production rule through an independent code path.
std::vector<int> oracle_greedy(const UnitaryMatrix& u, const RegionPartition& part,
                               int map_k) {
  const int n = u.dim();
  std::vector<int> col_source(n);
  for (int i = 0; i < n; ++i) col_source[i] = i;
  auto indicator = [&](const std::vector<int>& region) {
    std::vector<double> alpha(n, 0.0);
    for (int c : region) {
      for (int j = 0; j < n; ++j) {
        alpha[j] += std::norm(u.matrix()(j, col_source[c]));
      }
    }
    std::sort(alpha.begin(), alpha.end(), std::greater<double>());
    return alpha[map_k - 1];
  };
  for (size_t ri = 0; ri < part.regions.size(); ++ri) {
    for (size_t rj = ri + 1; rj < part.regions.size(); ++rj) {
      for (int b : part.regions[rj]) {
        for (int a : part.regions[ri]) {
          double before = indicator(part.regions[ri]);
          std::swap(col_source[a], col_source[b]);
          double after = indicator(part.regions[ri]);
          if (!(after > before)) std::swap(col_source[a], col_source[b]);
        }
      }
    }
  }
  return col_source;
}

TEST_CASE("partition_columns on a one-band device") {
  PatternTree t = gbsc::bfs_label(gbsc::zigzag_embed(Lattice{3, 8}));
  RegionPartition part = gbsc::partition_columns(t);
  REQUIRE(part.column_count() == 24);
  REQUIRE(part.regions[0].size() == 8);  // the main path
  REQUIRE(part.regions[0] == t.main_path);
  int branch_columns = 0;
  for (size_t r = 1; r < part.regions.size(); ++r) {
    REQUIRE(part.regions[r].size() >= 1);
    REQUIRE(part.regions[r].size() <= 2);
    branch_columns += static_cast<int>(part.regions[r].size());
  }
  REQUIRE(branch_columns == 16);
}

TEST_CASE("partition_columns covers every column exactly once") {
  for (int n : {5, 12, 24}) {
    PatternTree t = labeled_tree(n);
    RegionPartition part = gbsc::partition_columns(t);
    std::vector<bool> seen(n, false);
    for (const auto& region : part.regions) {
      for (int c : region) {
        REQUIRE(c >= 0);
        REQUIRE(c < n);
        REQUIRE_FALSE(seen[c]);
        seen[c] = true;
      }
    }
    REQUIRE(part.column_count() == n);
  }
}

TEST_CASE("chain pattern yields a single region") {
  PatternTree chain = gbsc::build_chain_pattern(6);
  RegionPartition part = gbsc::partition_columns(chain);
  REQUIRE(part.regions.size() == 1);
  REQUIRE(part.regions[0].size() == 6);
}

TEST_CASE("row_region_weights sums to the region size") {
  UnitaryMatrix u = gbsc::haar_random_unitary(9, 17);
  std::vector<int> region{0, 3, 5};
  std::vector<double> alpha = gbsc::row_region_weights(u, region);
  double total = 0.0;
  for (double a : alpha) total += a;
  REQUIRE(total == Catch::Approx(3.0).epsilon(0.0).margin(1e-12));
  REQUIRE_THROWS_AS(gbsc::row_region_weights(u, std::vector<int>{9}),
                    std::invalid_argument);
}

TEST_CASE("greedy_column_exchange matches the reference pass") {
  for (uint64_t seed : {1, 2, 3}) {
    UnitaryMatrix u = gbsc::haar_random_unitary(6, seed);
    RegionPartition part = gbsc::partition_columns(labeled_tree(6));
    for (int map_k : {2, 3}) {
      gbsc::ColumnExchangeResult ex = gbsc::greedy_column_exchange(u, part, map_k);
      std::vector<int> expect = oracle_greedy(u, part, map_k);
      REQUIRE(ex.col_source == expect);
      for (int j = 0; j < 6; ++j) {
        for (int i = 0; i < 6; ++i) {
          REQUIRE(ex.permuted.matrix()(i, j) == u.matrix()(i, ex.col_source[j]));
        }
      }
    }
  }
}

TEST_CASE("greedy_column_exchange never lowers the indicator") {
  UnitaryMatrix u = gbsc::haar_random_unitary(12, 4);
  RegionPartition part = gbsc::partition_columns(labeled_tree(12));
  const int map_k = 4;
  std::vector<double> alpha0 = gbsc::row_region_weights(u, part.regions[0]);
  std::sort(alpha0.begin(), alpha0.end(), std::greater<double>());
  gbsc::ColumnExchangeResult ex = gbsc::greedy_column_exchange(u, part, map_k);
  REQUIRE(ex.region0_indicator >= alpha0[map_k - 1]);
  REQUIRE(gbsc::is_permutation(ex.col_source));
  REQUIRE_THROWS_AS(gbsc::greedy_column_exchange(u, part, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(gbsc::greedy_column_exchange(u, part, 13), std::invalid_argument);
}

TEST_CASE("row_reorder sorts rows by ascending main-path weight") {
  UnitaryMatrix u = gbsc::haar_random_unitary(8, 23);
  PatternTree t = labeled_tree(8);
  RegionPartition part = gbsc::partition_columns(t);
  gbsc::RowReorderResult rr = gbsc::row_reorder(u, part.regions[0]);
  REQUIRE(gbsc::is_permutation(rr.row_source));
  std::vector<double> alpha = gbsc::row_region_weights(u, part.regions[0]);
  for (int i = 0; i + 1 < 8; ++i) {
    REQUIRE(alpha[rr.row_source[i]] <= alpha[rr.row_source[i + 1]]);
  }
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      REQUIRE(rr.permuted.matrix()(i, j) == u.matrix()(rr.row_source[i], j));
    }
  }
}

TEST_CASE("select_map_k applies its own permutations") {
  UnitaryMatrix u = gbsc::haar_random_unitary(12, 40);
  PatternTree t = labeled_tree(12);
  RegionPartition part = gbsc::partition_columns(t);
  gbsc::EliminationPlan plan = gbsc::build_plan(t);
  gbsc::MappingResult m = gbsc::select_map_k(u, part, plan, {4, 6, 8});
  REQUIRE((m.map_k == 4 || m.map_k == 6 || m.map_k == 8));
  UnitaryMatrix per = gbsc::apply_permutations(u, m.perms);
  REQUIRE((per.matrix() - m.permuted.matrix()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(m.small_angle_count >= 0);
  REQUIRE_THROWS_AS(gbsc::select_map_k(u, part, plan, {}), std::invalid_argument);
}

TEST_CASE("select_map_k picks the candidate with most small angles") {
  UnitaryMatrix u = gbsc::haar_random_unitary(12, 41);
  PatternTree t = labeled_tree(12);
  RegionPartition part = gbsc::partition_columns(t);
  gbsc::EliminationPlan plan = gbsc::build_plan(t);

  auto count_for = [&](int k) {
    gbsc::ColumnExchangeResult ex = gbsc::greedy_column_exchange(u, part, k);
    gbsc::RowReorderResult rr = gbsc::row_reorder(ex.permuted, part.regions[0]);
    gbsc::Decomposition d = gbsc::decompose(rr.permuted, plan);
    int count = 0;
    for (const auto& b : d.blocks) {
      if (std::abs(b.theta) < 0.1) ++count;
    }
    return count;
  };
  std::vector<int> ks{4, 6, 8};
  gbsc::MappingResult m = gbsc::select_map_k(u, part, plan, ks);
  int best = 0;
  int best_k = 0;
  for (int k : ks) {
    int c = count_for(k);
    if (c > best) {
      best = c;
      best_k = k;
    } else if (best_k == 0) {
      best_k = k;
    }
  }
  REQUIRE(m.small_angle_count == best);
  REQUIRE(m.map_k == best_k);
}

TEST_CASE("mapping beats or ties the trivial layout on most seeds") {
  const int n = 24;
  PatternTree t = labeled_tree(n);
  RegionPartition part = gbsc::partition_columns(t);
  gbsc::EliminationPlan plan = gbsc::build_plan(t);
  int wins = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    UnitaryMatrix u = gbsc::haar_random_unitary(n, seed);
    gbsc::Decomposition trivial = gbsc::decompose(u, plan);
    int trivial_count = 0;
    for (const auto& b : trivial.blocks) {
      if (std::abs(b.theta) < 0.1) ++trivial_count;
    }
    gbsc::MappingResult m = gbsc::select_map_k(u, part, plan, {8, 12, 16});
    if (m.small_angle_count >= trivial_count) ++wins;
  }
  REQUIRE(wins >= 4);
}

TEST_CASE("droppable_within_budget counts prefix mass") {
  std::vector<double> thetas{0.3, 0.1, 0.2};
  auto cost = [](double t) { return 2.0 * (1.0 - std::cos(t)); };
  double c1 = cost(0.1), c2 = cost(0.2), c3 = cost(0.3);
  REQUIRE(gbsc::droppable_within_budget(thetas, c1 + c2 + c3 + 1e-12) == 3);
  REQUIRE(gbsc::droppable_within_budget(thetas, c1 + c2 + 1e-12) == 2);
  REQUIRE(gbsc::droppable_within_budget(thetas, c1 / 2.0) == 0);
  REQUIRE(gbsc::droppable_within_budget({}, 1.0) == 0);
}

TEST_CASE("refine_mapping improves the surrogate and tracks permutations") {
  const int n = 12;
  UnitaryMatrix u = gbsc::haar_random_unitary(n, 9);
  gbsc::EliminationPlan plan = gbsc::build_plan(labeled_tree(n));
  const double tau = 0.95;
  int before = gbsc::droppable_within_budget(
      gbsc::elimination_thetas(u.matrix(), plan), n * (1.0 - tau));

  gbsc::RefinementResult ref = gbsc::refine_mapping(u, plan, tau, 5, 2000);
  REQUIRE(ref.droppable >= before);
  REQUIRE(gbsc::is_permutation(ref.row_source));
  REQUIRE(gbsc::is_permutation(ref.col_source));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      REQUIRE(ref.permuted.matrix()(i, j) ==
              u.matrix()(ref.row_source[i], ref.col_source[j]));
    }
  }
  REQUIRE(ref.droppable == gbsc::droppable_within_budget(
                               gbsc::elimination_thetas(ref.permuted.matrix(), plan),
                               n * (1.0 - tau)));

  gbsc::RefinementResult again = gbsc::refine_mapping(u, plan, tau, 5, 2000);
  REQUIRE(again.row_source == ref.row_source);
  REQUIRE(again.col_source == ref.col_source);

  gbsc::RefinementResult none = gbsc::refine_mapping(u, plan, tau, 5, 0);
  REQUIRE(none.row_source == gbsc::identity_permutation(n));
  REQUIRE(none.col_source == gbsc::identity_permutation(n));
  REQUIRE((none.permuted.matrix() - u.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("relabel_records copies the permutation arrays") {
  gbsc::PermutationPair p{{2, 0, 1}, {1, 2, 0}};
  gbsc::RelabelRecords rec = gbsc::relabel_records(p);
  REQUIRE(rec.input_map == p.col_perm);
  REQUIRE(rec.output_map == p.row_perm);
}

}  // namespace
