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

#ifndef GBSC_ELIMINATION_HPP
#define GBSC_ELIMINATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"

namespace gbsc {

/// One MZI: a beamsplitter with rotation theta across qumodes (m, n) plus a
/// phase shifter phi on qumode m. As a matrix it is the identity except
///
///   T[m][m] = e^{i phi} cos(theta)    T[m][n] = -sin(theta)
///   T[n][m] = e^{i phi} sin(theta)    T[n][n] =  cos(theta)
///
/// A dropped block keeps its phase shifter but loses the beamsplitter, i.e.
/// it acts as T with theta = 0.
struct MziBlock {
  int m = 0;
  int n = 0;
  double theta = 0.0;
  double phi = 0.0;
  bool dropped = false;
};

struct EliminationStep {
  int row = 0;  // unitary row whose entry is zeroed
  int m = 0;    // column being eliminated
  int n = 0;    // column the amplitude accumulates into
};

/// Full elimination order for one pattern: n(n-1)/2 steps, grouped by target
/// row from row n-1 down to row 1 (0-based).
struct EliminationPlan {
  int n_qumodes = 0;
  std::vector<EliminationStep> steps;
  PatternTree tree;
};

struct EliminationAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Angles (theta, phi) such that right-multiplying by T_{m,n}(theta, phi)†
/// zeroes u_m: e^{-i phi} cos(theta) u_m - sin(theta) u_n = 0. theta lies in
/// [0, pi/2], phi in (-pi, pi]. Degenerate cases: u_m = 0 gives (0, 0);
/// u_m != 0 with u_n = 0 gives (pi/2, 0).
inline EliminationAngles solve_elimination(Complex u_m, Complex u_n) {
  const double am = std::abs(u_m);
  const double an = std::abs(u_n);
  if (am == 0.0) return {0.0, 0.0};
  if (an == 0.0) return {std::numbers::pi / 2.0, 0.0};
  double phi = std::arg(u_m * std::conj(u_n));
  if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
  return {std::atan2(am, an), phi};
}

/// In-place right multiplication by T_{m,n}(theta, phi)†: the elimination
/// move, mixing columns m and n.
inline void apply_elimination(Matrix& w, int m, int n, double theta,
                              double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex e = std::exp(Complex(0.0, -phi));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    const Complex wm = w(r, m);
    const Complex wn = w(r, n);
    w(r, m) = e * c * wm - s * wn;
    w(r, n) = e * s * wm + c * wn;
  }
}

/// In-place left multiplication by T_{m,n}(theta, phi): applying the block
/// to a circuit unitary, mixing rows m and n. A dropped block applies with
/// theta = 0 (phase shifter retained).
inline void apply_block(Matrix& w, const MziBlock& b) {
  const double theta = b.dropped ? 0.0 : b.theta;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex e = std::exp(Complex(0.0, b.phi));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const Complex rm = w(b.m, j);
    const Complex rn = w(b.n, j);
    w(b.m, j) = e * c * rm - s * rn;
    w(b.n, j) = e * s * rm + c * rn;
  }
}

/// Dense N x N matrix of a single block. Oracle-friendly; the fast paths
/// above are what the engine uses.
inline Matrix block_matrix(const MziBlock& b, int dim) {
  Matrix t = Matrix::Identity(dim, dim);
  const double theta = b.dropped ? 0.0 : b.theta;
  const Complex e = std::exp(Complex(0.0, b.phi));
  t(b.m, b.m) = e * std::cos(theta);
  t(b.m, b.n) = -std::sin(theta);
  t(b.n, b.m) = e * std::sin(theta);
  t(b.n, b.n) = std::cos(theta);
  return t;
}

/// Builds the row-by-row elimination order for a labeled pattern tree.
///
/// Row r is eliminated over the label prefix {1..r} re-rooted at node r: a
/// post-order sweep emits (child, parent) pairs, visiting each node's
/// children in ascending order of the minimum label in their subtree. That
/// puts the main-path flow first, so branch entries are always eliminated
/// against an accumulator that has already absorbed the path amplitude, and
/// the final transfer of each row lands on node r.
inline EliminationPlan build_plan(const PatternTree& tree) {
  if (!tree.labeled) {
    throw std::invalid_argument("build_plan: tree must be BFS-labeled");
  }
  const int n = tree.size();
  auto adj = tree.adjacency();
  for (int v = 1; v < n; ++v) {
    bool has_lower = false;
    for (int u : adj[v]) has_lower = has_lower || u < v;
    if (!has_lower) {
      throw std::invalid_argument("build_plan: label prefix not connected");
    }
  }

  EliminationPlan plan;
  plan.n_qumodes = n;
  plan.tree = tree;
  plan.steps.reserve(static_cast<size_t>(n) * (n - 1) / 2);

  std::vector<int> up(n);      // parent within the prefix rooted at `root`
  std::vector<int> min_label(n);
  std::vector<std::vector<int>> kids(n);
  for (int root = n - 1; root >= 1; --root) {
    // Orient the prefix {0..root} towards `root`.
    for (int v = 0; v <= root; ++v) kids[v].clear();
    std::vector<int> order;
    order.reserve(root + 1);
    up[root] = -1;
    std::vector<bool> seen(root + 1, false);
    seen[root] = true;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      order.push_back(v);
      for (int u : adj[v]) {
        if (u <= root && !seen[u]) {
          seen[u] = true;
          up[u] = v;
          kids[v].push_back(u);
          q.push(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      min_label[*it] = *it;
      for (int k : kids[*it]) min_label[*it] = std::min(min_label[*it], min_label[k]);
    }
    for (int v = 0; v <= root; ++v) {
      std::sort(kids[v].begin(), kids[v].end(),
                [&](int a, int b) { return min_label[a] < min_label[b]; });
    }
    // Iterative post-order from the root.
    std::vector<std::pair<int, size_t>> stack;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < kids[v].size()) {
        int child = kids[v][next++];
        stack.push_back({child, 0});
      } else {
        if (v != root) plan.steps.push_back({root, v, up[v]});
        stack.pop_back();
      }
    }
  }
  return plan;
}

/// Result of eliminating a unitary: the blocks in application order (first
/// applied first) and the terminal phases, so that
/// U = diag(e^{i final_phases}) · T_k · ... · T_1.
struct Decomposition {
  int source_dim = 0;
  std::vector<MziBlock> blocks;
  std::vector<double> final_phases;
};

/// Rotation angles the plan would produce on w, skipping validation, block
/// assembly, and the residual check. Row r is never read after its own
/// elimination, so column updates stop at the current root row. Used in hot
/// loops (mapping refinement) where only the angle spectrum matters.
inline std::vector<double> elimination_thetas(Matrix w, const EliminationPlan& plan) {
  std::vector<double> thetas;
  thetas.reserve(plan.steps.size());
  for (const EliminationStep& s : plan.steps) {
    EliminationAngles a = solve_elimination(w(s.row, s.m), w(s.row, s.n));
    thetas.push_back(a.theta);
    const Complex phase = std::exp(Complex(0.0, -a.phi));
    const double c = std::cos(a.theta), sn = std::sin(a.theta);
    const int rows = s.row + 1;
    for (int r = 0; r < rows; ++r) {
      const Complex um = w(r, s.m), un = w(r, s.n);
      w(r, s.m) = phase * c * um - sn * un;
      w(r, s.n) = phase * sn * um + c * un;
    }
  }
  return thetas;
}

/// Per-step snapshot handed to an observer during decompose; columns are the
/// full working-matrix columns m and n before and after the step.
struct EliminationStepRecord {
  EliminationStep step;
  double theta = 0.0;
  double phi = 0.0;
  Eigen::VectorXcd col_m_before, col_n_before, col_m_after, col_n_after;
};

using StepObserver = std::function<void(const EliminationStepRecord&)>;

inline Decomposition decompose(const UnitaryMatrix& u,
                               const EliminationPlan& plan,
                               const StepObserver& observer = {}) {
  if (u.dim() != plan.n_qumodes) {
    throw std::invalid_argument("decompose: unitary and plan dimensions differ");
  }
  const int n = u.dim();
  Matrix w = u.matrix();
  Decomposition d;
  d.source_dim = n;
  d.blocks.reserve(plan.steps.size());
  for (const EliminationStep& step : plan.steps) {
    auto [theta, phi] = solve_elimination(w(step.row, step.m), w(step.row, step.n));
    EliminationStepRecord rec;
    if (observer) {
      rec.step = step;
      rec.theta = theta;
      rec.phi = phi;
      rec.col_m_before = w.col(step.m);
      rec.col_n_before = w.col(step.n);
    }
    apply_elimination(w, step.m, step.n, theta, phi);
    d.blocks.push_back({step.m, step.n, theta, phi, false});
    if (observer) {
      rec.col_m_after = w.col(step.m);
      rec.col_n_after = w.col(step.n);
      observer(rec);
    }
  }
  double residual = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) residual = std::max(residual, std::abs(w(i, j)));
    }
  }
  if (residual > 1e-6) {
    std::ostringstream msg;
    msg << "decompose: residual off-diagonal mass " << residual
        << " after elimination";
    throw std::runtime_error(msg.str());
  }
  d.final_phases.resize(n);
  for (int i = 0; i < n; ++i) d.final_phases[i] = std::arg(w(i, i));
  return d;
}

inline std::vector<bool> keep_all(const Decomposition& d) {
  return std::vector<bool>(d.blocks.size(), true);
}

/// Rebuilds diag(e^{i final_phases}) · T_k · ... · T_1, with blocks not in
/// `keep` applied as bare phase shifters (theta = 0).
inline UnitaryMatrix reconstruct(const Decomposition& d,
                                 const std::vector<bool>& keep) {
  if (keep.size() != d.blocks.size()) {
    throw std::invalid_argument("reconstruct: keep mask size mismatch");
  }
  Matrix w = Matrix::Identity(d.source_dim, d.source_dim);
  for (size_t i = 0; i < d.blocks.size(); ++i) {
    MziBlock b = d.blocks[i];
    b.dropped = !keep[i];
    apply_block(w, b);
  }
  for (int i = 0; i < d.source_dim; ++i) {
    w.row(i) *= std::exp(Complex(0.0, d.final_phases[i]));
  }
  return UnitaryMatrix(std::move(w));
}

inline UnitaryMatrix reconstruct(const Decomposition& d) {
  return reconstruct(d, keep_all(d));
}

}  // namespace gbsc

#endif  // GBSC_ELIMINATION_HPP
