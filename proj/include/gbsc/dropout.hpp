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

#ifndef GBSC_DROPOUT_HPP
#define GBSC_DROPOUT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbsc/elimination.hpp"
#include "gbsc/matrix.hpp"

namespace gbsc {

struct ThresholdResult {
  double theta_cut = 0.0;  // blocks with |theta| < theta_cut are dropped
  int kept_count = 0;
};

/// Keep mask for a deterministic cut: block i survives iff |theta_i| >= cut.
inline std::vector<bool> deterministic_cut(const Decomposition& d, double theta_cut) {
  std::vector<bool> keep(d.blocks.size());
  for (size_t i = 0; i < d.blocks.size(); ++i) {
    keep[i] = std::abs(d.blocks[i].theta) >= theta_cut;
  }
  return keep;
}

/// Largest angle cut whose deterministic reconstruction still reaches
/// fidelity tau against u. Candidate cuts sit at the distinct |theta|
/// values (dropping every block strictly below) plus a sentinel just above
/// the maximum, which drops everything. A binary search over the candidate
/// cuts locates the boundary quickly; a linear verification walk then
/// corrects for any local non-monotonicity of the fidelity.
inline ThresholdResult find_threshold(const Decomposition& d, const UnitaryMatrix& u,
                                      double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("find_threshold: tau must lie in (0, 1)");
  }
  const int total = static_cast<int>(d.blocks.size());
  if (total == 0) return {0.0, 0};

  std::vector<double> mags(total);
  for (int i = 0; i < total; ++i) mags[i] = std::abs(d.blocks[i].theta);
  std::sort(mags.begin(), mags.end());

  // Candidate drop counts: one per distinct magnitude boundary.
  std::vector<int> drops{0};
  for (int k = 1; k < total; ++k) {
    if (mags[k - 1] < mags[k]) drops.push_back(k);
  }
  drops.push_back(total);

  auto cut_for = [&](int k) -> double {
    if (k == 0) return 0.0;
    if (k == total) {
      return std::nextafter(mags.back(), std::numeric_limits<double>::infinity());
    }
    return mags[k];
  };
  std::vector<double> memo(drops.size(), -1.0);
  auto fid_at = [&](size_t idx) -> double {
    if (memo[idx] < 0.0) {
      UnitaryMatrix approx = reconstruct(d, deterministic_cut(d, cut_for(drops[idx])));
      memo[idx] = fidelity(approx, u);
    }
    return memo[idx];
  };

  if (fid_at(0) < tau) {
    throw std::invalid_argument(
        "find_threshold: tau " + std::to_string(tau) +
        " exceeds the exact reconstruction fidelity " + std::to_string(fid_at(0)));
  }

  size_t lo = 0, hi = drops.size() - 1;
  while (lo < hi) {
    size_t mid = lo + (hi - lo + 1) / 2;
    if (fid_at(mid) >= tau) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  // The fidelity is not strictly monotone in the cut, so walk to the exact
  // boundary: the largest feasible cut whose successor is infeasible.
  while (lo > 0 && fid_at(lo) < tau) --lo;
  while (lo + 1 < drops.size() && fid_at(lo + 1) >= tau) ++lo;

  return {cut_for(drops[lo]), total - drops[lo]};
}

/// Discrete distribution over all blocks with weight proportional to
/// |theta_i / theta_cut|^power_k. Weights are kept in log space so that
/// large exponents cannot overflow; probs is the normalized linear form.
struct BlockDistribution {
  std::vector<double> probs;
  std::vector<double> log_weights;
};

inline BlockDistribution build_distribution(const std::vector<double>& thetas,
                                            double theta_cut, int power_k) {
  if (!(theta_cut > 0.0)) {
    throw std::invalid_argument("build_distribution: theta_cut must be positive");
  }
  if (power_k < 1) {
    throw std::invalid_argument("build_distribution: power_k must be at least 1");
  }
  const size_t n = thetas.size();
  BlockDistribution dist;
  dist.log_weights.resize(n);
  dist.probs.assign(n, 0.0);

  const double neg_inf = -std::numeric_limits<double>::infinity();
  double max_log = neg_inf;
  const double log_cut = std::log(theta_cut);
  for (size_t i = 0; i < n; ++i) {
    double mag = std::abs(thetas[i]);
    dist.log_weights[i] =
        mag == 0.0 ? neg_inf : power_k * (std::log(mag) - log_cut);
    max_log = std::max(max_log, dist.log_weights[i]);
  }
  if (max_log == neg_inf) {
    throw std::invalid_argument("build_distribution: all rotation angles are zero");
  }
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += std::exp(dist.log_weights[i] - max_log);
  const double log_norm = max_log + std::log(sum);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    dist.probs[i] = std::exp(dist.log_weights[i] - log_norm);
    total += dist.probs[i];
  }
  for (double& p : dist.probs) p /= total;
  return dist;
}

/// Samples `count` distinct indices without replacement, proportionally to
/// the (log-space) weights, via the Gumbel-top-k trick: perturb each log
/// weight with independent Gumbel noise and keep the `count` largest. This
/// matches sequential weighted sampling without replacement.
inline std::vector<bool> sample_weighted_subset(const std::vector<double>& log_weights,
                                                int count, std::mt19937_64& rng) {
  const int n = static_cast<int>(log_weights.size());
  if (count < 0 || count > n) {
    throw std::invalid_argument("sample_weighted_subset: count out of range");
  }
  int finite = 0;
  for (double lw : log_weights) {
    if (lw != -std::numeric_limits<double>::infinity()) ++finite;
  }
  if (count > finite) {
    throw std::invalid_argument(
        "sample_weighted_subset: fewer blocks with nonzero weight than requested");
  }
  std::vector<bool> keep(n, false);
  if (count == 0) return keep;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, int>> keys;
  keys.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (log_weights[i] == -std::numeric_limits<double>::infinity()) continue;
    double v = unit(rng);
    while (v <= 0.0) v = unit(rng);
    double gumbel = -std::log(-std::log(v));
    keys.emplace_back(log_weights[i] + gumbel, i);
  }
  std::nth_element(keys.begin(), keys.begin() + (count - 1), keys.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < count; ++i) keep[keys[i].second] = true;
  return keep;
}

struct DropoutModel {
  double tau = 0.0;
  double theta_cut = 0.0;
  int kept_count = 0;
  int power_k = 0;
  int iterations = 0;
  double mean_fidelity = 0.0;  // tau_K: mean sampled fidelity at the chosen power_k
  std::vector<double> probs;
  std::vector<double> log_weights;
};

/// Draws one kept set from the model. Distinct seeds give independent shots.
inline std::vector<bool> sample_kept_set(const DropoutModel& model, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_weighted_subset(model.log_weights, model.kept_count, rng);
}

/// Calibrates the sampling exponent: for each candidate power_k, runs
/// `iterations` sampled reconstructions of kept_count blocks and averages
/// the fidelity against u. The candidate with the highest mean wins; ties
/// favour the larger power_k, which concentrates the distribution closer to
/// the deterministic cut.
inline DropoutModel select_power_k(const Decomposition& d, const UnitaryMatrix& u,
                                   double tau, const ThresholdResult& threshold,
                                   const std::vector<int>& k_candidates,
                                   int iterations, uint64_t seed) {
  if (k_candidates.empty()) {
    throw std::invalid_argument("select_power_k: no power_k candidates");
  }
  if (iterations < 1) {
    throw std::invalid_argument("select_power_k: iterations must be at least 1");
  }
  std::vector<int> candidates = k_candidates;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  std::vector<double> thetas(d.blocks.size());
  for (size_t i = 0; i < d.blocks.size(); ++i) thetas[i] = d.blocks[i].theta;

  DropoutModel best;
  bool have_best = false;
  for (int k : candidates) {
    BlockDistribution dist = build_distribution(thetas, threshold.theta_cut, k);
    double mean = 0.0;
    for (int it = 0; it < iterations; ++it) {
      std::mt19937_64 rng(substream_seed(seed, static_cast<uint64_t>(k),
                                         static_cast<uint64_t>(it)));
      std::vector<bool> keep =
          sample_weighted_subset(dist.log_weights, threshold.kept_count, rng);
      mean += fidelity(reconstruct(d, keep), u);
    }
    mean /= iterations;
    if (!have_best || mean >= best.mean_fidelity) {
      have_best = true;
      best.tau = tau;
      best.theta_cut = threshold.theta_cut;
      best.kept_count = threshold.kept_count;
      best.power_k = k;
      best.iterations = iterations;
      best.mean_fidelity = mean;
      best.probs = std::move(dist.probs);
      best.log_weights = std::move(dist.log_weights);
    }
  }
  return best;
}

}  // namespace gbsc

#endif  // GBSC_DROPOUT_HPP
