// Copyright 2026 The hamdecomp Authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hamdecomp/graph.hpp"

namespace hamdecomp {

using AdjacencyList = std::vector<std::vector<std::int32_t>>;

inline AdjacencyList to_adjacency(const Graph& g) {
  AdjacencyList adj(static_cast<std::size_t>(g.vertex_count()));
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    auto nb = g.neighbors(v);
    adj[v].assign(nb.begin(), nb.end());
  }
  return adj;
}

/// mate[v] is v's partner or -1.
struct Matching {
  std::vector<std::int32_t> mate;

  std::size_t size() const {
    std::size_t c = 0;
    for (std::size_t v = 0; v < mate.size(); ++v)
      if (mate[v] > static_cast<std::int32_t>(v)) ++c;
    return c;
  }
  bool perfect() const {
    return std::none_of(mate.begin(), mate.end(), [](std::int32_t m) { return m < 0; });
  }
  std::vector<Edge> pairs() const {
    std::vector<Edge> out;
    for (std::size_t v = 0; v < mate.size(); ++v)
      if (mate[v] > static_cast<std::int32_t>(v)) out.emplace_back(static_cast<Vertex>(v), mate[v]);
    return out;
  }
};

/**
   Maximum cardinality matching in a general graph.

   Edmonds' augmenting-path search with blossom contraction; blossom bases are
   tracked with a union-find forest. Per-search state is reset only on the
   vertices the search touched, so repeated searches on a large, mostly
   matched graph stay proportional to the explored region.
 */
class BlossomMatcher {
 public:
  explicit BlossomMatcher(const AdjacencyList& adj)
      : adj_(adj),
        n_(static_cast<std::int32_t>(adj.size())),
        mate_(adj.size(), -1),
        label_(adj.size(), kUnseen),
        link_(adj.size(), -1),
        base_(adj.size()),
        depth_(adj.size(), 0) {
    std::iota(base_.begin(), base_.end(), 0);
  }

  /// Installs a starting matching; it must be consistent and use only edges.
  void seed(const std::vector<std::int32_t>& mate) {
    if (mate.size() != mate_.size()) throw std::invalid_argument("seed size mismatch");
    for (std::int32_t v = 0; v < n_; ++v) {
      std::int32_t w = mate[v];
      if (w < 0) continue;
      if (w >= n_ || mate[w] != v) throw std::invalid_argument("seed is not a matching");
    }
    mate_ = mate;
  }

  void greedy() {
    for (std::int32_t u = 0; u < n_; ++u) {
      if (mate_[u] >= 0) continue;
      for (std::int32_t v : adj_[u])
        if (v != u && mate_[v] < 0) {
          mate_[u] = v;
          mate_[v] = u;
          break;
        }
    }
  }

  /// Augments from every exposed vertex. With `stop_on_failure`, returns as
  /// soon as one exposed vertex admits no augmenting path; such a vertex is
  /// exposed in some maximum matching, so no perfect matching exists.
  Matching solve(bool stop_on_failure = false) {
    for (std::int32_t u = 0; u < n_; ++u) {
      if (mate_[u] >= 0) continue;
      if (!augment_from(u) && stop_on_failure) break;
    }
    return Matching{mate_};
  }

  bool augment_from(std::int32_t root) {
    struct Reset {
      BlossomMatcher& m;
      ~Reset() {
        for (std::int32_t t : m.touched_) {
          m.label_[t] = kUnseen;
          m.base_[t] = t;
        }
        m.touched_.clear();
      }
    } reset{*this};
    queue_.clear();
    std::size_t head = 0;
    mark(root, kOuter);
    depth_[root] = 0;
    queue_.push_back(root);
    while (head < queue_.size()) {
      std::int32_t u = queue_[head++];
      for (std::int32_t v : adj_[u]) {
        if (label_[v] == kUnseen) {
          mark(v, kInner);
          link_[v] = u;
          depth_[v] = depth_[u] + 1;
          if (mate_[v] < 0) {
            flip(v, u);
            return true;
          }
          std::int32_t w = mate_[v];
          mark(w, kOuter);
          depth_[w] = depth_[u] + 2;
          queue_.push_back(w);
        } else if (label_[v] == kOuter && find(v) != find(u)) {
          std::int32_t b = lca(u, v);
          contract(u, v, b);
          contract(v, u, b);
        }
      }
    }
    return false;
  }

  const std::vector<std::int32_t>& mate() const { return mate_; }

 private:
  static constexpr std::int8_t kUnseen = -1;
  static constexpr std::int8_t kInner = 0;
  static constexpr std::int8_t kOuter = 1;

  void mark(std::int32_t v, std::int8_t lab) {
    if (label_[v] == kUnseen) touched_.push_back(v);
    label_[v] = lab;
  }

  std::int32_t find(std::int32_t u) {
    while (base_[u] != u) {
      base_[u] = base_[base_[u]];
      u = base_[u];
    }
    return u;
  }

  std::int32_t lca(std::int32_t u, std::int32_t v) {
    u = find(u);
    v = find(v);
    while (u != v) {
      if (depth_[u] < depth_[v]) std::swap(u, v);
      u = find(link_[mate_[u]]);
    }
    return u;
  }

  void contract(std::int32_t u, std::int32_t v, std::int32_t b) {
    while (find(u) != b) {
      link_[u] = v;
      v = mate_[u];
      if (label_[v] == kInner) {
        label_[v] = kOuter;
        queue_.push_back(v);
      }
      base_[u] = b;
      base_[v] = b;
      u = link_[v];
    }
  }

  void flip(std::int32_t x, std::int32_t y) {
    while (y != -1) {
      std::int32_t next = mate_[y];
      mate_[x] = y;
      mate_[y] = x;
      x = next;
      y = x == -1 ? -1 : link_[x];
    }
  }

  const AdjacencyList& adj_;
  std::int32_t n_;
  std::vector<std::int32_t> mate_;
  std::vector<std::int8_t> label_;
  std::vector<std::int32_t> link_;
  std::vector<std::int32_t> base_;
  std::vector<std::int32_t> depth_;
  std::vector<std::int32_t> queue_;
  std::vector<std::int32_t> touched_;
};

struct GeneralMatchingResult {
  Matching matching;
  bool perfect = false;
};

/// Maximum matching of g; `perfect` iff it has size n/2.
inline GeneralMatchingResult perfect_matching_general(const Graph& g) {
  auto adj = to_adjacency(g);
  BlossomMatcher bm(adj);
  bm.greedy();
  auto m = bm.solve();
  bool perfect = m.perfect();
  return {std::move(m), perfect};
}

/**
   Hopcroft-Karp maximum matching in a bipartite graph with `left` adjacency
   lists into a right class of size `right_size`.
 */
class HopcroftKarp {
 public:
  HopcroftKarp(const AdjacencyList& left, std::int32_t right_size)
      : adj_(left),
        nl_(static_cast<std::int32_t>(left.size())),
        match_l_(left.size(), -1),
        match_r_(static_cast<std::size_t>(right_size), -1),
        dist_(left.size(), 0),
        it_(left.size(), 0) {}

  std::size_t solve() {
    std::size_t size = 0;
    // Greedy warm start.
    for (std::int32_t u = 0; u < nl_; ++u)
      for (std::int32_t v : adj_[u])
        if (match_r_[v] < 0) {
          match_l_[u] = v;
          match_r_[v] = u;
          ++size;
          break;
        }
    while (bfs()) {
      std::fill(it_.begin(), it_.end(), 0);
      for (std::int32_t u = 0; u < nl_; ++u)
        if (match_l_[u] < 0 && dfs(u)) ++size;
    }
    return size;
  }

  const std::vector<std::int32_t>& match_left() const { return match_l_; }
  const std::vector<std::int32_t>& match_right() const { return match_r_; }

 private:
  static constexpr std::int32_t kInf = std::numeric_limits<std::int32_t>::max();

  bool bfs() {
    std::vector<std::int32_t> q;
    q.reserve(static_cast<std::size_t>(nl_));
    for (std::int32_t u = 0; u < nl_; ++u) {
      if (match_l_[u] < 0) {
        dist_[u] = 0;
        q.push_back(u);
      } else {
        dist_[u] = kInf;
      }
    }
    bool found = false;
    for (std::size_t h = 0; h < q.size(); ++h) {
      std::int32_t u = q[h];
      for (std::int32_t v : adj_[u]) {
        std::int32_t w = match_r_[v];
        if (w < 0) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push_back(w);
        }
      }
    }
    return found;
  }

  bool dfs(std::int32_t u) {
    for (auto& i = it_[u]; i < adj_[u].size(); ++i) {
      std::int32_t v = adj_[u][i];
      std::int32_t w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        ++i;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  const AdjacencyList& adj_;
  std::int32_t nl_;
  std::vector<std::int32_t> match_l_;
  std::vector<std::int32_t> match_r_;
  std::vector<std::int32_t> dist_;
  std::vector<std::size_t> it_;
};

}  // namespace hamdecomp
