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

#ifndef GBSC_PATTERN_TREE_HPP
#define GBSC_PATTERN_TREE_HPP

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gbsc/lattice.hpp"

namespace gbsc {

/// Elimination pattern: a tree of qumodes embedded in a device lattice.
///
/// Edges are directed child -> parent towards the end point (the direction
/// amplitude accumulates along). The main path is the tree path from the
/// start point to the end point; every other node is a branch hanging at
/// tree distance one or two off the main path.
///
/// Once `labeled` is set, node id k carries BFS label k + 1 and the label
/// prefix {1..r} is connected for every r, which is what the row-by-row
/// elimination plans rely on.
struct PatternTree {
  Lattice device;
  std::vector<Site> coords;    // per node id
  std::vector<int> parent;     // towards the end point; -1 exactly there
  std::vector<int> main_path;  // node ids, start point first
  bool labeled = false;

  int size() const { return static_cast<int>(coords.size()); }
  int start() const { return main_path.front(); }
  int end_point() const { return main_path.back(); }

  std::vector<std::vector<int>> children_lists() const {
    std::vector<std::vector<int>> children(size());
    for (int v = 0; v < size(); ++v) {
      if (parent[v] >= 0) children[parent[v]].push_back(v);
    }
    for (auto& c : children) std::sort(c.begin(), c.end());
    return children;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(size());
    for (int v = 0; v < size(); ++v) {
      if (parent[v] >= 0) {
        adj[v].push_back(parent[v]);
        adj[parent[v]].push_back(v);
      }
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  std::vector<bool> main_path_mask() const {
    std::vector<bool> mask(size(), false);
    for (int v : main_path) mask[v] = true;
    return mask;
  }
};

/// Structural checks shared by all pattern builders. Throws on violation.
inline void validate_pattern_tree(const PatternTree& t) {
  const int n = t.size();
  if (n < 1 || static_cast<int>(t.parent.size()) != n || t.main_path.empty()) {
    throw std::runtime_error("pattern tree: inconsistent sizes");
  }
  std::set<std::pair<int, int>> sites;
  for (const Site& s : t.coords) {
    if (!t.device.contains(s.row, s.col)) {
      throw std::runtime_error("pattern tree: node outside device lattice");
    }
    if (!sites.insert({s.row, s.col}).second) {
      throw std::runtime_error("pattern tree: duplicate lattice site");
    }
  }
  int roots = 0;
  std::vector<int> degree(n, 0);
  for (int v = 0; v < n; ++v) {
    int p = t.parent[v];
    if (p == -1) {
      ++roots;
      continue;
    }
    if (p < 0 || p >= n || p == v) {
      throw std::runtime_error("pattern tree: parent index out of range");
    }
    if (!lattice_adjacent(t.coords[v], t.coords[p])) {
      throw std::runtime_error("pattern tree: edge between non-adjacent sites");
    }
    ++degree[v];
    ++degree[p];
  }
  if (roots != 1 || t.parent[t.end_point()] != -1) {
    throw std::runtime_error("pattern tree: end point must be the unique root");
  }
  for (int d : degree) {
    if (d > 4) throw std::runtime_error("pattern tree: node degree exceeds 4");
  }
  // Every node must reach the root; catches cycles and disconnection.
  std::vector<char> reaches(n, 0);
  reaches[t.end_point()] = 1;
  for (int v = 0; v < n; ++v) {
    std::vector<int> chain;
    int w = v;
    int guard = 0;
    while (!reaches[w]) {
      chain.push_back(w);
      w = t.parent[w];
      if (w < 0 || ++guard > n) {
        throw std::runtime_error("pattern tree: parent chain does not reach root");
      }
    }
    for (int u : chain) reaches[u] = 1;
  }
  for (size_t i = 0; i + 1 < t.main_path.size(); ++i) {
    if (t.parent[t.main_path[i]] != t.main_path[i + 1]) {
      throw std::runtime_error("pattern tree: main path is not a parent chain");
    }
  }
  // Branches sit at tree distance <= 2 from the main path.
  auto adj = t.adjacency();
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  for (int v : t.main_path) {
    dist[v] = 0;
    q.push(v);
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : adj[v]) {
      if (dist[u] == -1) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (dist[v] < 0 || dist[v] > 2) {
      throw std::runtime_error("pattern tree: branch too far from main path");
    }
  }
  if (t.labeled) {
    for (int v = 1; v < n; ++v) {
      bool has_lower = false;
      for (int u : adj[v]) has_lower = has_lower || u < v;
      if (!has_lower) {
        throw std::runtime_error("pattern tree: label prefix not connected");
      }
    }
    if (t.start() != 0) {
      throw std::runtime_error("pattern tree: start point must carry label 1");
    }
  }
}

namespace detail {

inline PatternTree chain_over_sites(const Lattice& device,
                                    std::vector<Site> sites) {
  PatternTree t;
  t.device = device;
  t.coords = std::move(sites);
  const int n = t.size();
  t.parent.assign(n, -1);
  t.main_path.resize(n);
  for (int i = 0; i < n; ++i) {
    t.main_path[i] = i;
    if (i + 1 < n) t.parent[i] = i + 1;
  }
  t.labeled = true;
  validate_pattern_tree(t);
  return t;
}

}  // namespace detail

/// Chain pattern 1 -> 2 -> ... -> n on a 1 x n strip. The degenerate pattern
/// every lattice supports; also the baseline elimination order.
inline PatternTree build_chain_pattern(int n) {
  if (n < 2) throw std::invalid_argument("build_chain_pattern: n must be at least 2");
  std::vector<Site> sites(n);
  for (int i = 0; i < n; ++i) sites[i] = {0, i};
  return detail::chain_over_sites(Lattice(1, n), std::move(sites));
}

/// Chain pattern embedded in `device` as a boustrophedon sweep, truncated to
/// the first n sites. Keeps chain neighbours lattice-adjacent on 2D devices.
inline PatternTree chain_on_device(const Lattice& device, int n) {
  if (n < 2) throw std::invalid_argument("chain_on_device: n must be at least 2");
  if (n > device.node_count()) {
    throw std::invalid_argument("chain_on_device: device has fewer nodes than n");
  }
  std::vector<Site> sites;
  sites.reserve(n);
  for (int r = 0; r < device.rows && static_cast<int>(sites.size()) < n; ++r) {
    for (int i = 0; i < device.cols && static_cast<int>(sites.size()) < n; ++i) {
      int c = (r % 2 == 0) ? i : device.cols - 1 - i;
      sites.push_back({r, c});
    }
  }
  return detail::chain_over_sites(device, std::move(sites));
}

/// Embeds the full elimination pattern template into a rectangular lattice.
///
/// The device is covered in horizontal bands of three rows. The main path
/// runs along the middle row of each band, starting at the bottom-left and
/// alternating direction band by band; at each band end it climbs vertically
/// through the one or two cells separating band middle rows. All remaining
/// cells attach as single-node branches above or below their main-path
/// neighbour. Leftover rows: rows % 3 == 2 leaves a two-row partial band on
/// top (main path in its lower row, branches above); rows % 3 == 1 leaves a
/// bare main-path row. When the lattice is taller than wide the construction
/// runs transposed so the main path follows the longer edge.
///
/// Returned node ids are in construction order; run bfs_label before
/// building elimination plans.
inline PatternTree zigzag_embed(const Lattice& device) {
  if (device.node_count() < 2) {
    throw std::invalid_argument("zigzag_embed: device too small");
  }
  const bool transposed = device.rows > device.cols;
  const int R = transposed ? device.cols : device.rows;  // band axis
  const int C = transposed ? device.rows : device.cols;  // path axis

  PatternTree t;
  t.device = device;
  auto add = [&](int row, int col) {
    t.coords.push_back(transposed ? Site{col, row} : Site{row, col});
    t.parent.push_back(-1);
    return static_cast<int>(t.coords.size()) - 1;
  };

  if (R == 1) {
    std::vector<Site> sites(C);
    for (int c = 0; c < C; ++c) {
      sites[c] = transposed ? Site{c, 0} : Site{0, c};
    }
    return detail::chain_over_sites(device, std::move(sites));
  }

  struct Band {
    int main_row;
    bool below;
    bool above;
  };
  std::vector<Band> bands;
  for (int k = 0; k < R / 3; ++k) bands.push_back({3 * k + 1, true, true});
  if (R % 3 == 1) bands.push_back({R - 1, false, false});
  if (R % 3 == 2) bands.push_back({R - 2, false, true});

  int prev_main = -1;
  auto link_main = [&](int id) {
    if (prev_main >= 0) t.parent[prev_main] = id;
    t.main_path.push_back(id);
    prev_main = id;
  };

  for (size_t k = 0; k < bands.size(); ++k) {
    const Band& band = bands[k];
    const bool left_to_right = (k % 2 == 0);
    const int entry_col = left_to_right ? 0 : C - 1;
    const int turn_col = left_to_right ? C - 1 : 0;
    const bool has_next = k + 1 < bands.size();
    for (int i = 0; i < C; ++i) {
      const int c = left_to_right ? i : C - 1 - i;
      int mid = add(band.main_row, c);
      link_main(mid);
      // The cell below the entry column was consumed by the previous
      // connector; the cell above the turn column will be consumed by the
      // next one.
      if (band.below && !(k > 0 && c == entry_col)) {
        int b = add(band.main_row - 1, c);
        t.parent[b] = mid;
      }
      if (band.above && !(has_next && c == turn_col)) {
        int b = add(band.main_row + 1, c);
        t.parent[b] = mid;
      }
    }
    if (has_next) {
      for (int r = band.main_row + 1; r < bands[k + 1].main_row; ++r) {
        link_main(add(r, turn_col));
      }
    }
  }

  validate_pattern_tree(t);
  return t;
}

/// Relabels nodes 1..n in breadth-first order from the start point. At each
/// visited node the branch children are expanded before the main-path
/// successor (shorter branches first), so branches near the start receive
/// low labels. Node ids of the returned tree equal label - 1.
inline PatternTree bfs_label(const PatternTree& t) {
  const int n = t.size();
  auto children = t.children_lists();

  // Subtree sizes in the towards-end orientation.
  std::vector<int> topo;
  topo.reserve(n);
  {
    std::queue<int> tq;
    tq.push(t.end_point());
    while (!tq.empty()) {
      int v = tq.front();
      tq.pop();
      topo.push_back(v);
      for (int c : children[v]) tq.push(c);
    }
  }
  if (static_cast<int>(topo.size()) != n) {
    throw std::runtime_error("bfs_label: tree is not connected");
  }
  std::vector<int> subtree(n, 1);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    if (t.parent[*it] != -1) subtree[t.parent[*it]] += subtree[*it];
  }

  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> visited(n, false);
  std::queue<int> q;
  q.push(t.start());
  visited[t.start()] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    order.push_back(v);
    std::vector<int> kids = children[v];
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      return std::make_pair(subtree[a], a) < std::make_pair(subtree[b], b);
    });
    for (int kid : kids) {
      if (!visited[kid]) {
        visited[kid] = true;
        q.push(kid);
      }
    }
    int p = t.parent[v];
    if (p != -1 && !visited[p]) {
      visited[p] = true;
      q.push(p);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::runtime_error("bfs_label: tree is not connected");
  }

  std::vector<int> new_id(n);
  for (int i = 0; i < n; ++i) new_id[order[i]] = i;
  PatternTree out;
  out.device = t.device;
  out.labeled = true;
  out.coords.resize(n);
  out.parent.resize(n);
  for (int v = 0; v < n; ++v) {
    out.coords[new_id[v]] = t.coords[v];
    out.parent[new_id[v]] = (t.parent[v] == -1) ? -1 : new_id[t.parent[v]];
  }
  out.main_path.reserve(t.main_path.size());
  for (int v : t.main_path) out.main_path.push_back(new_id[v]);
  validate_pattern_tree(out);
  return out;
}

/// Restricts a labeled pattern to its n lowest labels. BFS labeling orders
/// every node after the neighbour it was discovered through, so the label
/// prefix is always connected. The end point is re-designated as the
/// highest-label main-path node retained and edges are re-oriented towards
/// it.
inline PatternTree select_subpattern(const PatternTree& t, int n) {
  if (!t.labeled) {
    throw std::invalid_argument("select_subpattern: tree must be BFS-labeled");
  }
  if (n < 1) throw std::invalid_argument("select_subpattern: n must be positive");
  if (n > t.size()) {
    throw std::invalid_argument("select_subpattern: pattern has fewer nodes than n");
  }

  auto adj = t.adjacency();
  // Edge set of the prefix: each kept node keeps the edge to its unique
  // lower-labeled neighbour.
  std::vector<std::vector<int>> kept_adj(n);
  for (int v = 1; v < n; ++v) {
    int pred = -1;
    for (int u : adj[v]) {
      if (u < v) {
        if (pred != -1) {
          throw std::runtime_error("select_subpattern: label prefix not a tree");
        }
        pred = u;
      }
    }
    if (pred == -1) {
      throw std::runtime_error("select_subpattern: label prefix not connected");
    }
    kept_adj[v].push_back(pred);
    kept_adj[pred].push_back(v);
  }

  PatternTree out;
  out.device = t.device;
  out.labeled = true;
  out.coords.assign(t.coords.begin(), t.coords.begin() + n);
  for (int v : t.main_path) {
    if (v >= n) break;
    out.main_path.push_back(v);
  }
  const int new_end = out.main_path.back();

  out.parent.assign(n, -2);
  out.parent[new_end] = -1;
  std::queue<int> q;
  q.push(new_end);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : kept_adj[v]) {
      if (out.parent[u] == -2) {
        out.parent[u] = v;
        q.push(u);
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (out.parent[v] == -2) {
      throw std::runtime_error("select_subpattern: label prefix not connected");
    }
  }
  validate_pattern_tree(out);
  return out;
}

}  // namespace gbsc

#endif  // GBSC_PATTERN_TREE_HPP
