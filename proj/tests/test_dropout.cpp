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
#include <limits>
#include <random>
#include <vector>

#include "gbsc/dropout.hpp"
#include "gbsc/elimination.hpp"
#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"

namespace {

using gbsc::Decomposition;
using gbsc::ThresholdResult;
using gbsc::UnitaryMatrix;

Decomposition decompose_zigzag(const UnitaryMatrix& u) {
  const int n = u.dim();
  gbsc::Lattice device{3, (n + 2) / 3};
  auto plan = gbsc::build_plan(
      gbsc::select_subpattern(gbsc::bfs_label(gbsc::zigzag_embed(device)), n));
  return gbsc::decompose(u, plan);
}

// Exhaustive reference: evaluate the fidelity at every candidate cut and
// return the one dropping the most blocks while staying feasible.
ThresholdResult oracle_threshold(const Decomposition& d, const UnitaryMatrix& u,
                                 double tau) {
  const int total = static_cast<int>(d.blocks.size());
  std::vector<double> mags(total);
  for (int i = 0; i < total; ++i) mags[i] = std::abs(d.blocks[i].theta);
  std::sort(mags.begin(), mags.end());
  std::vector<int> drops{0};
  for (int k = 1; k < total; ++k) {
    if (mags[k - 1] < mags[k]) drops.push_back(k);
  }
  drops.push_back(total);
  for (auto it = drops.rbegin(); it != drops.rend(); ++it) {
    double cut = 0.0;
    if (*it == total) {
      cut = std::nextafter(mags.back(), std::numeric_limits<double>::infinity());
    } else if (*it > 0) {
      cut = mags[*it];
    }
    UnitaryMatrix approx = gbsc::reconstruct(d, gbsc::deterministic_cut(d, cut));
    if (gbsc::fidelity(approx, u) >= tau) return {cut, total - *it};
  }
  return {0.0, total};
}

TEST_CASE("deterministic_cut keeps blocks at or above the cut") {
  Decomposition d;
  d.source_dim = 4;
  d.blocks = {{0, 1, 0.05, 0.0, false},
              {1, 2, 0.2, 0.1, false},
              {2, 3, 0.0, 0.4, false},
              {0, 2, 0.2, -0.3, false}};
  d.final_phases.assign(4, 0.0);
  std::vector<bool> keep = gbsc::deterministic_cut(d, 0.2);
  REQUIRE(keep == std::vector<bool>{false, true, false, true});
  keep = gbsc::deterministic_cut(d, 0.0);
  REQUIRE(keep == std::vector<bool>{true, true, true, true});
}

TEST_CASE("find_threshold agrees with the exhaustive reference") {
  for (uint64_t seed : {1, 2, 3, 4}) {
    for (double tau : {0.9, 0.95, 0.99}) {
      UnitaryMatrix u = gbsc::haar_random_unitary(12, seed);
      Decomposition d = decompose_zigzag(u);
      ThresholdResult got = gbsc::find_threshold(d, u, tau);
      ThresholdResult want = oracle_threshold(d, u, tau);
      REQUIRE(got.kept_count == want.kept_count);
      REQUIRE(got.theta_cut == want.theta_cut);

      UnitaryMatrix approx =
          gbsc::reconstruct(d, gbsc::deterministic_cut(d, got.theta_cut));
      REQUIRE(gbsc::fidelity(approx, u) >= tau);
    }
  }
}

TEST_CASE("find_threshold sits on the feasibility boundary") {
  UnitaryMatrix u = gbsc::haar_random_unitary(10, 6);
  Decomposition d = decompose_zigzag(u);
  const double tau = 0.95;
  ThresholdResult got = gbsc::find_threshold(d, u, tau);
  const int total = static_cast<int>(d.blocks.size());
  if (got.kept_count > 0) {
    // Dropping one more block (the smallest kept angle) must break tau.
    std::vector<double> mags(total);
    for (int i = 0; i < total; ++i) mags[i] = std::abs(d.blocks[i].theta);
    std::sort(mags.begin(), mags.end());
    double next_cut =
        std::nextafter(mags[total - got.kept_count],
                       std::numeric_limits<double>::infinity());
    UnitaryMatrix more =
        gbsc::reconstruct(d, gbsc::deterministic_cut(d, next_cut));
    REQUIRE(gbsc::fidelity(more, u) < tau);
  }
}

TEST_CASE("find_threshold validates tau") {
  UnitaryMatrix u = gbsc::haar_random_unitary(6, 2);
  Decomposition d = decompose_zigzag(u);
  REQUIRE_THROWS_AS(gbsc::find_threshold(d, u, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(gbsc::find_threshold(d, u, 1.0), std::invalid_argument);
}

TEST_CASE("build_distribution follows the power law") {
  std::vector<double> thetas{0.1, 0.2, 0.4};
  gbsc::BlockDistribution dist = gbsc::build_distribution(thetas, 0.4, 2);
  REQUIRE(dist.probs.size() == 3);
  double sum = dist.probs[0] + dist.probs[1] + dist.probs[2];
  REQUIRE(sum == Catch::Approx(1.0).epsilon(0.0).margin(1e-12));
  // Ratios are (theta_i / theta_j)^K.
  REQUIRE(dist.probs[1] / dist.probs[0] == Catch::Approx(4.0).margin(1e-9));
  REQUIRE(dist.probs[2] / dist.probs[1] == Catch::Approx(4.0).margin(1e-9));

  // Huge exponents stay finite thanks to log-space weights.
  gbsc::BlockDistribution sharp = gbsc::build_distribution(thetas, 0.4, 1000);
  REQUIRE(std::isfinite(sharp.probs[2]));
  REQUIRE(sharp.probs[2] == Catch::Approx(1.0).margin(1e-12));

  REQUIRE_THROWS_AS(gbsc::build_distribution(thetas, 0.0, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(gbsc::build_distribution(thetas, 0.4, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(gbsc::build_distribution({0.0, 0.0}, 0.4, 2),
                    std::invalid_argument);
}

TEST_CASE("zero angles never enter a sampled kept set") {
  std::vector<double> thetas{0.0, 0.3, 0.2, 0.0, 0.4};
  gbsc::BlockDistribution dist = gbsc::build_distribution(thetas, 0.4, 3);
  std::mt19937_64 rng(12);
  for (int it = 0; it < 200; ++it) {
    std::vector<bool> keep = gbsc::sample_weighted_subset(dist.log_weights, 3, rng);
    REQUIRE_FALSE(keep[0]);
    REQUIRE_FALSE(keep[3]);
    int kept = 0;
    for (bool k : keep) kept += k ? 1 : 0;
    REQUIRE(kept == 3);
  }
  REQUIRE_THROWS_AS(gbsc::sample_weighted_subset(dist.log_weights, 4, rng),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(gbsc::sample_weighted_subset(dist.log_weights, -1, rng),
                    std::invalid_argument);
}

TEST_CASE("gumbel subset sampling matches sequential without replacement") {
  // Five weights, keep two. Exact inclusion marginals follow from summing
  // the sequential draw probabilities over ordered pairs.
  std::vector<double> thetas{0.1, 0.15, 0.2, 0.3, 0.4};
  const int kept = 2;
  gbsc::BlockDistribution dist = gbsc::build_distribution(thetas, 0.4, 2);
  const auto& w = dist.probs;
  std::vector<double> marginal(5, 0.0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      marginal[i] += w[i] * (w[j] / (1.0 - w[i]));  // i first, j second
      marginal[i] += w[j] * (w[i] / (1.0 - w[j]));  // j first, i second
    }
  }

  const int shots = 100000;
  std::vector<int> hits(5, 0);
  std::mt19937_64 rng(99);
  for (int s = 0; s < shots; ++s) {
    std::vector<bool> keep = gbsc::sample_weighted_subset(dist.log_weights, kept, rng);
    for (int i = 0; i < 5; ++i) hits[i] += keep[i] ? 1 : 0;
  }
  for (int i = 0; i < 5; ++i) {
    double p = marginal[i];
    double sigma = std::sqrt(p * (1.0 - p) / shots);
    REQUIRE(std::abs(hits[i] / double(shots) - p) < 4.0 * sigma + 1e-9);
  }
}

TEST_CASE("sample_kept_set is seed-deterministic") {
  UnitaryMatrix u = gbsc::haar_random_unitary(10, 3);
  Decomposition d = decompose_zigzag(u);
  ThresholdResult th = gbsc::find_threshold(d, u, 0.95);
  gbsc::DropoutModel model =
      gbsc::select_power_k(d, u, 0.95, th, {1, 2, 5, 10, 20, 50, 100}, 20, 7);

  REQUIRE(model.kept_count == th.kept_count);
  REQUIRE(model.theta_cut == th.theta_cut);
  REQUIRE(model.mean_fidelity > 0.0);
  REQUIRE(model.mean_fidelity <= 1.0);

  std::vector<bool> a = gbsc::sample_kept_set(model, 5);
  std::vector<bool> b = gbsc::sample_kept_set(model, 5);
  std::vector<bool> c = gbsc::sample_kept_set(model, 6);
  REQUIRE(a == b);
  int kept = 0;
  for (bool k : a) kept += k ? 1 : 0;
  REQUIRE(kept == model.kept_count);
  (void)c;
}

TEST_CASE("select_power_k maximises the mean sampled fidelity") {
  UnitaryMatrix u = gbsc::haar_random_unitary(10, 14);
  Decomposition d = decompose_zigzag(u);
  ThresholdResult th = gbsc::find_threshold(d, u, 0.95);
  const std::vector<int> ks{1, 5, 100};
  const int iterations = 15;
  const uint64_t seed = 3;
  gbsc::DropoutModel model = gbsc::select_power_k(d, u, 0.95, th, ks, iterations, seed);

  double best_mean = -1.0;
  int best_k = 0;
  for (int k : ks) {
    auto thetas = std::vector<double>(d.blocks.size());
    for (size_t i = 0; i < d.blocks.size(); ++i) thetas[i] = d.blocks[i].theta;
    gbsc::BlockDistribution dist = gbsc::build_distribution(thetas, th.theta_cut, k);
    double mean = 0.0;
    for (int it = 0; it < iterations; ++it) {
      std::mt19937_64 rng(gbsc::substream_seed(seed, k, it));
      auto keep = gbsc::sample_weighted_subset(dist.log_weights, th.kept_count, rng);
      mean += gbsc::fidelity(gbsc::reconstruct(d, keep), u);
    }
    mean /= iterations;
    if (mean >= best_mean) {
      best_mean = mean;
      best_k = k;
    }
  }
  REQUIRE(model.power_k == best_k);
  REQUIRE(model.mean_fidelity == Catch::Approx(best_mean).epsilon(0.0).margin(1e-12));

  REQUIRE_THROWS_AS(gbsc::select_power_k(d, u, 0.95, th, {}, 5, 1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(gbsc::select_power_k(d, u, 0.95, th, ks, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("a sharp exponent reproduces the deterministic cut") {
  // Well separated spectrum: each angle is twice the previous one.
  Decomposition d;
  d.source_dim = 8;
  const double thetas[] = {0.002, 0.004, 0.008, 0.016, 0.24, 0.48, 0.96};
  for (int i = 0; i < 7; ++i) {
    d.blocks.push_back({i % 7, (i + 1) % 8, thetas[i], 0.05 * i, false});
  }
  d.final_phases.assign(8, 0.0);
  UnitaryMatrix target = gbsc::reconstruct(d);
  const ThresholdResult th{0.24, 3};  // keep the three largest angles

  auto theta_list = std::vector<double>(7);
  for (int i = 0; i < 7; ++i) theta_list[i] = thetas[i];
  gbsc::BlockDistribution dist =
      gbsc::build_distribution(theta_list, th.theta_cut, 100);
  std::vector<bool> det = gbsc::deterministic_cut(d, th.theta_cut);
  std::mt19937_64 rng(17);
  for (int it = 0; it < 50; ++it) {
    std::vector<bool> keep =
        gbsc::sample_weighted_subset(dist.log_weights, th.kept_count, rng);
    REQUIRE(keep == det);
  }
}

}  // namespace
