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
#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace hamdecomp {

using Vertex = std::int32_t;
using VertexSet = std::vector<Vertex>;

/// Undirected edge stored in canonical form (u < v).
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  constexpr Edge() = default;
  constexpr Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

  constexpr std::uint64_t key() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  }
  constexpr bool touches(Vertex x) const { return u == x || v == x; }
  constexpr Vertex other(Vertex x) const { return x == u ? v : u; }

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Edge& e) {
  return os << '{' << e.u << ',' << e.v << '}';
}

/**
   Simple undirected graph on vertices 0..n-1.

   Neighbor lists are kept sorted; a parallel hash set of edge keys answers
   membership queries in O(1).
 */
class Graph {
 public:
  Graph() = default;
  explicit Graph(Vertex n) : adj_(static_cast<std::size_t>(checked_n(n))) {}

  Graph(Vertex n, std::span<const Edge> edges) : Graph(n) {
    keys_.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
      check_pair(e.u, e.v);
      if (!keys_.insert(e.key()).second) continue;
      adj_[e.u].push_back(e.v);
      adj_[e.v].push_back(e.u);
    }
    for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
  }

  Vertex vertex_count() const { return static_cast<Vertex>(adj_.size()); }
  std::size_t edge_count() const { return keys_.size(); }

  bool has_edge(Vertex a, Vertex b) const {
    if (a == b || !in_range(a) || !in_range(b)) return false;
    return keys_.contains(Edge(a, b).key());
  }

  /// Returns false when the edge was already present.
  bool add_edge(Vertex a, Vertex b) {
    check_pair(a, b);
    if (!keys_.insert(Edge(a, b).key()).second) return false;
    insert_sorted(adj_[a], b);
    insert_sorted(adj_[b], a);
    return true;
  }

  /// Returns false when the edge was absent.
  bool remove_edge(Vertex a, Vertex b) {
    if (!has_edge(a, b)) return false;
    keys_.erase(Edge(a, b).key());
    erase_sorted(adj_[a], b);
    erase_sorted(adj_[b], a);
    return true;
  }

  std::span<const Vertex> neighbors(Vertex v) const { return adj_.at(v); }
  std::size_t degree(Vertex v) const { return adj_.at(v).size(); }

  std::size_t min_degree() const {
    std::size_t d = adj_.empty() ? 0 : adj_[0].size();
    for (const auto& nbrs : adj_) d = std::min(d, nbrs.size());
    return d;
  }
  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& nbrs : adj_) d = std::max(d, nbrs.size());
    return d;
  }

  /// All edges in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(keys_.size());
    for (Vertex u = 0; u < vertex_count(); ++u)
      for (Vertex v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  /// Verifies the representation invariants; returns a description of the
  /// first violation.
  std::optional<std::string> check_invariants() const {
    std::size_t half_edges = 0;
    for (Vertex u = 0; u < vertex_count(); ++u) {
      const auto& nbrs = adj_[u];
      half_edges += nbrs.size();
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        if (nbrs[i] == u) return "self-loop at " + std::to_string(u);
        if (i > 0 && nbrs[i - 1] >= nbrs[i])
          return "unsorted or parallel adjacency at " + std::to_string(u);
        if (!keys_.contains(Edge(u, nbrs[i]).key()))
          return "adjacency entry missing from edge set at " + std::to_string(u);
      }
    }
    if (half_edges != 2 * keys_.size()) return "degree sum differs from 2|E|";
    return std::nullopt;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  static Vertex checked_n(Vertex n) {
    if (n < 0) throw std::invalid_argument("negative vertex count");
    return n;
  }
  bool in_range(Vertex v) const { return v >= 0 && v < vertex_count(); }
  void check_pair(Vertex a, Vertex b) const {
    if (!in_range(a) || !in_range(b))
      throw std::out_of_range("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-loops are not allowed");
  }
  static void insert_sorted(std::vector<Vertex>& xs, Vertex x) {
    xs.insert(std::lower_bound(xs.begin(), xs.end(), x), x);
  }
  static void erase_sorted(std::vector<Vertex>& xs, Vertex x) {
    xs.erase(std::lower_bound(xs.begin(), xs.end(), x));
  }

  std::vector<std::vector<Vertex>> adj_;
  std::unordered_set<std::uint64_t> keys_;
};

inline Graph complete_graph(Vertex n) {
  std::vector<Edge> es;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) es.emplace_back(u, v);
  return Graph(n, es);
}

inline Graph cycle_graph(Vertex n) {
  std::vector<Edge> es;
  for (Vertex u = 0; u < n; ++u) es.emplace_back(u, (u + 1) % n);
  return Graph(n, es);
}

/// Partition (S, T, U) of the vertex set.
struct VertexPartition {
  VertexSet s_set;
  VertexSet t_set;
  VertexSet u_set;

  bool is_partition_of(Vertex n) const {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (const VertexSet* part : {&s_set, &t_set, &u_set})
      for (Vertex v : *part) {
        if (v < 0 || v >= n || seen[v]++) return false;
      }
    return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
  }
};

/// Vertex-disjoint cycles, each listed as a closed vertex sequence.
struct CycleCover {
  std::vector<std::vector<Vertex>> cycles;

  std::size_t cycle_count() const { return cycles.size(); }
  std::size_t vertex_count() const {
    std::size_t total = 0;
    for (const auto& c : cycles) total += c.size();
    return total;
  }
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (const auto& c : cycles)
      for (std::size_t i = 0; i < c.size(); ++i)
        out.emplace_back(c[i], c[(i + 1) % c.size()]);
    return out;
  }
};

/// Checks that `cover` is a union of vertex-disjoint cycles of length >= 3
/// using only edges of `host`; with `spanning`, also that it covers every
/// vertex of `host`.
inline std::optional<std::string> validate_cycle_cover(const Graph& host, const CycleCover& cover,
                                                       bool spanning) {
  const Vertex n = host.vertex_count();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& c : cover.cycles) {
    if (c.size() < 3) return "cycle shorter than 3";
    for (std::size_t i = 0; i < c.size(); ++i) {
      Vertex v = c[i];
      if (v < 0 || v >= n) return "vertex out of range";
      if (seen[v]++) return "vertex " + std::to_string(v) + " repeated";
      Vertex w = c[(i + 1) % c.size()];
      if (!host.has_edge(v, w))
        return "pair {" + std::to_string(v) + "," + std::to_string(w) + "} is not an edge";
    }
  }
  if (spanning)
    for (Vertex v = 0; v < n; ++v)
      if (!seen[v]) return "vertex " + std::to_string(v) + " not covered";
  return std::nullopt;
}

/**
   Vertex-disjoint cycles plus one vertex-disjoint long path. Together they
   span all vertices.
 */
struct BrokenTwoFactor {
  std::vector<std::vector<Vertex>> cycles;
  std::vector<Vertex> path;

  std::vector<Edge> edges() const {
    std::vector<Edge> out = CycleCover{cycles}.edges();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) out.emplace_back(path[i], path[i + 1]);
    return out;
  }
};

/// Structural check. When `host` is given, every used pair must be an edge of it.
inline std::optional<std::string> validate_broken_two_factor(Vertex n, const BrokenTwoFactor& b,
                                                             const Graph* host = nullptr) {
  if (b.path.empty()) return "long path is empty";
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  auto visit = [&](Vertex v) -> std::optional<std::string> {
    if (v < 0 || v >= n) return "vertex out of range";
    if (seen[v]++) return "vertex " + std::to_string(v) + " used twice";
    return std::nullopt;
  };
  auto edge_ok = [&](Vertex a, Vertex c) -> std::optional<std::string> {
    if (host && !host->has_edge(a, c))
      return "pair {" + std::to_string(a) + "," + std::to_string(c) + "} not in host";
    return std::nullopt;
  };
  for (std::size_t i = 0; i < b.path.size(); ++i) {
    if (auto err = visit(b.path[i])) return err;
    if (i + 1 < b.path.size())
      if (auto err = edge_ok(b.path[i], b.path[i + 1])) return err;
  }
  for (const auto& c : b.cycles) {
    if (c.size() < 3) return "cycle shorter than 3";
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (auto err = visit(c[i])) return err;
      if (auto err = edge_ok(c[i], c[(i + 1) % c.size()])) return err;
    }
  }
  for (Vertex v = 0; v < n; ++v)
    if (!seen[v]) return "vertex " + std::to_string(v) + " not covered";
  return std::nullopt;
}

namespace detail {
inline std::vector<char> membership(Vertex n, std::span<const Vertex> set) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Vertex v : set) {
    if (v < 0 || v >= n) throw std::out_of_range("vertex out of range");
    in[v] = 1;
  }
  return in;
}
}  // namespace detail

/// e_G(A, B): edges with one endpoint in A and the other in B, each counted
/// once. With A = B this is the number of edges inside A.
inline std::size_t edge_count_between(const Graph& g, std::span<const Vertex> a,
                                      std::span<const Vertex> b) {
  const Vertex n = g.vertex_count();
  auto in_a = detail::membership(n, a);
  auto in_b = detail::membership(n, b);
  std::size_t count = 0;
  for (Vertex u = 0; u < n; ++u) {
    if (!in_a[u]) continue;
    for (Vertex v : g.neighbors(u)) {
      if (!in_b[v]) continue;
      // Edge seen from both sides when u in B and v in A.
      if (in_a[v] && in_b[u] && v < u) continue;
      ++count;
    }
  }
  return count;
}

/// B_G(A): vertices outside A with a neighbour in A, ascending.
inline VertexSet boundary(const Graph& g, std::span<const Vertex> a) {
  const Vertex n = g.vertex_count();
  auto in_a = detail::membership(n, a);
  std::vector<char> mark(static_cast<std::size_t>(n), 0);
  for (Vertex u = 0; u < n; ++u)
    if (in_a[u])
      for (Vertex v : g.neighbors(u))
        if (!in_a[v]) mark[v] = 1;
  VertexSet out;
  for (Vertex v = 0; v < n; ++v)
    if (mark[v]) out.push_back(v);
  return out;
}

/// Connected components of the induced subgraph g[restrict]. Each component
/// is sorted; components are ordered by their smallest vertex.
inline std::vector<VertexSet> components(const Graph& g, std::span<const Vertex> restrict_to) {
  const Vertex n = g.vertex_count();
  auto in_r = detail::membership(n, restrict_to);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<VertexSet> out;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (!in_r[s] || seen[s]) continue;
    VertexSet comp;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (Vertex v : g.neighbors(u))
        if (in_r[v] && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

inline bool verify_hamilton_cycle(const Graph& g, std::span<const Vertex> cyc) {
  const Vertex n = g.vertex_count();
  if (n < 3 || cyc.size() != static_cast<std::size_t>(n)) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    Vertex v = cyc[i];
    if (v < 0 || v >= n || seen[v]++) return false;
    if (!g.has_edge(v, cyc[(i + 1) % cyc.size()])) return false;
  }
  return true;
}

// Edge-list text format: "n m" header, then one "u v" pair per line. Lines
// starting with '#' are comments.

inline void write_edge_list(std::ostream& os, const Graph& g,
                            const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

inline Graph read_edge_list(std::istream& is, std::vector<std::string>* comments = nullptr) {
  std::string line;
  long long n = -1, m = -1;
  std::vector<Edge> es;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("edge list line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (comments) {
        auto body = line.find_first_not_of(" \t", first + 1);
        comments->push_back(body == std::string::npos ? "" : line.substr(body));
      }
      continue;
    }
    std::istringstream ls(line);
    long long a, b;
    if (!(ls >> a >> b)) fail("expected two integers");
    std::string rest;
    if (ls >> rest) fail("trailing tokens");
    if (n < 0) {
      if (a < 0 || b < 0) fail("negative header");
      n = a;
      m = b;
      continue;
    }
    if (a < 0 || b < 0 || a >= n || b >= n) fail("endpoint out of range");
    if (a == b) fail("self-loop");
    es.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
  }
  if (n < 0) throw std::runtime_error("edge list: missing header");
  Graph g(static_cast<Vertex>(n), es);
  if (g.edge_count() != es.size()) throw std::runtime_error("edge list: parallel edge");
  if (static_cast<long long>(es.size()) != m)
    throw std::runtime_error("edge list: header edge count mismatch");
  return g;
}

}  // namespace hamdecomp
