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

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamdecomp/graph.hpp"
#include "hamdecomp/matching.hpp"
#include "hamdecomp/orientation.hpp"

namespace hamdecomp {

/// Tutte's r-factor quantities for one partition (S, T, U).
struct TutteQuantities {
  int r = 0;
  VertexPartition partition;
  long long R = 0;  // sum_{v in T} d(v) - e(S,T) + r(|S| - |T|)
  long long Q = 0;  // odd components C of G[U]: r|C| + e(C,T) odd

  bool satisfied() const { return R >= Q; }
};

/// Direct evaluation through the graph-core primitives.
inline TutteQuantities tutte_quantities(const Graph& g, int r, const VertexPartition& part) {
  if (!part.is_partition_of(g.vertex_count())) throw std::invalid_argument("not a partition");
  TutteQuantities q;
  q.r = r;
  q.partition = part;
  long long deg_t = 0;
  for (Vertex v : part.t_set) deg_t += static_cast<long long>(g.degree(v));
  q.R = deg_t - static_cast<long long>(edge_count_between(g, part.s_set, part.t_set)) +
        static_cast<long long>(r) * (static_cast<long long>(part.s_set.size()) -
                                     static_cast<long long>(part.t_set.size()));
  for (const auto& c : components(g, part.u_set)) {
    long long parity = static_cast<long long>(r) * static_cast<long long>(c.size()) +
                       static_cast<long long>(edge_count_between(g, c, part.t_set));
    if (parity % 2 != 0) ++q.Q;
  }
  return q;
}

struct TutteVerdict {
  bool factor_exists = false;
  std::optional<TutteQuantities> violation;
  std::uint64_t partitions_checked = 0;
};

inline constexpr Vertex kDefaultTutteCap = 12;

/// Checks R_r(S,T) >= Q_r(S,T) over all 3^n partitions; stops at the first
/// violating partition.
inline TutteVerdict tutte_check_exhaustive(const Graph& g, int r, Vertex cap = kDefaultTutteCap) {
  const Vertex n = g.vertex_count();
  if (n > cap || n > 20)
    throw std::invalid_argument("tutte_check_exhaustive: n=" + std::to_string(n) +
                                " exceeds cap " + std::to_string(cap));
  if (r < 0) throw std::invalid_argument("r must be non-negative");
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (const Edge& e : g.edges()) {
    adj[e.u] |= 1u << e.v;
    adj[e.v] |= 1u << e.u;
  }
  auto e_between = [&](std::uint32_t a, std::uint32_t b) {
    long long c = 0;
    for (std::uint32_t x = a; x; x &= x - 1) c += std::popcount(adj[std::countr_zero(x)] & b);
    return c;
  };
  TutteVerdict out;
  std::vector<int> digit(static_cast<std::size_t>(n), 0);  // 0 -> U, 1 -> S, 2 -> T
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  while (true) {
    std::uint32_t s = 0, t = 0;
    for (Vertex v = 0; v < n; ++v) {
      if (digit[v] == 1) s |= 1u << v;
      if (digit[v] == 2) t |= 1u << v;
    }
    const std::uint32_t u = all & ~s & ~t;
    long long deg_t = 0;
    for (std::uint32_t x = t; x; x &= x - 1) deg_t += std::popcount(adj[std::countr_zero(x)]);
    const long long R = deg_t - e_between(s, t) +
                        static_cast<long long>(r) * (std::popcount(s) - std::popcount(t));
    long long Q = 0;
    for (std::uint32_t rem = u; rem;) {
      std::uint32_t comp = rem & (~rem + 1u), frontier = comp;
      while (frontier) {
        std::uint32_t grow = 0;
        for (std::uint32_t x = frontier; x; x &= x - 1) grow |= adj[std::countr_zero(x)];
        frontier = grow & u & ~comp;
        comp |= frontier;
      }
      rem &= ~comp;
      if ((static_cast<long long>(r) * std::popcount(comp) + e_between(comp, t)) % 2) ++Q;
    }
    ++out.partitions_checked;
    if (R < Q) {
      TutteQuantities q;
      q.r = r;
      q.R = R;
      q.Q = Q;
      for (Vertex v = 0; v < n; ++v)
        (digit[v] == 1 ? q.partition.s_set : digit[v] == 2 ? q.partition.t_set : q.partition.u_set)
            .push_back(v);
      out.violation = std::move(q);
      return out;
    }
    Vertex i = 0;
    while (i < n && digit[i] == 2) digit[i++] = 0;
    if (i == n) break;
    ++digit[i];
  }
  out.factor_exists = true;
  return out;
}

/**
   Tutte's gadget: a graph whose perfect matchings correspond to r-factors
   of the host.

   Vertex v contributes d(v) edge-slots (one per incident edge, in neighbor
   order) followed by d(v) - r core-slots. Every core-slot of v is joined to
   every edge-slot of v, and each host edge uv joins u's slot for uv to v's
   slot for uv (a connector).
 */
struct GadgetGraph {
  struct Connector {
    std::int32_t a = 0;  // slot at host_edge.u
    std::int32_t b = 0;  // slot at host_edge.v
    Edge host_edge;
  };

  int r = 0;
  AdjacencyList adj;
  std::vector<std::int32_t> slot_base;  // first edge-slot of each host vertex
  std::vector<std::int32_t> core_base;  // first core-slot of each host vertex
  std::vector<Connector> connectors;

  std::size_t node_count() const { return adj.size(); }
  std::size_t edge_count() const {
    std::size_t h = 0;
    for (const auto& a : adj) h += a.size();
    return h / 2;
  }
};

inline GadgetGraph build_gadget(const Graph& g, int r) {
  if (r < 0) throw std::invalid_argument("build_gadget: negative r");
  if (static_cast<std::size_t>(r) > g.min_degree())
    throw std::invalid_argument("build_gadget: r=" + std::to_string(r) +
                                " exceeds the minimum degree");
  const Vertex n = g.vertex_count();
  GadgetGraph gg;
  gg.r = r;
  gg.slot_base.resize(static_cast<std::size_t>(n));
  gg.core_base.resize(static_cast<std::size_t>(n));
  std::int32_t next = 0;
  for (Vertex v = 0; v < n; ++v) {
    auto d = static_cast<std::int32_t>(g.degree(v));
    gg.slot_base[v] = next;
    gg.core_base[v] = next + d;
    next += 2 * d - r;
  }
  gg.adj.resize(static_cast<std::size_t>(next));
  for (Vertex v = 0; v < n; ++v) {
    auto d = static_cast<std::int32_t>(g.degree(v));
    for (std::int32_t c = 0; c < d - r; ++c)
      for (std::int32_t s = 0; s < d; ++s) {
        gg.adj[gg.core_base[v] + c].push_back(gg.slot_base[v] + s);
        gg.adj[gg.slot_base[v] + s].push_back(gg.core_base[v] + c);
      }
  }
  auto slot = [&](Vertex v, Vertex w) {
    auto nb = g.neighbors(v);
    return gg.slot_base[v] +
           static_cast<std::int32_t>(std::lower_bound(nb.begin(), nb.end(), w) - nb.begin());
  };
  for (const Edge& e : g.edges()) {
    GadgetGraph::Connector c{slot(e.u, e.v), slot(e.v, e.u), e};
    gg.adj[c.a].push_back(c.b);
    gg.adj[c.b].push_back(c.a);
    gg.connectors.push_back(c);
  }
  return gg;
}

/// Host edges whose connectors are matched.
inline Graph factor_from_gadget_matching(const Graph& host, const GadgetGraph& gg,
                                         const std::vector<std::int32_t>& mate) {
  std::vector<Edge> es;
  for (const auto& c : gg.connectors)
    if (mate[c.a] == c.b) es.push_back(c.host_edge);
  return Graph(host.vertex_count(), es);
}

namespace detail {

/// Dinic max-flow, sized for the bipartite degree-constrained subproblem.
class Dinic {
 public:
  explicit Dinic(std::int32_t n) : g_(static_cast<std::size_t>(n)), level_(g_.size()), it_(g_.size()) {}

  std::size_t add_edge(std::int32_t a, std::int32_t b, int cap) {
    g_[a].push_back({b, static_cast<std::int32_t>(g_[b].size()), cap});
    g_[b].push_back({a, static_cast<std::int32_t>(g_[a].size() - 1), 0});
    return g_[a].size() - 1;
  }

  long long max_flow(std::int32_t s, std::int32_t t) {
    long long flow = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (int f = dfs(s, t, std::numeric_limits<int>::max())) flow += f;
    }
    return flow;
  }

  int residual(std::int32_t a, std::size_t idx) const { return g_[a][idx].cap; }

 private:
  struct E {
    std::int32_t to;
    std::int32_t rev;
    int cap;
  };

  bool bfs(std::int32_t s, std::int32_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::int32_t> q{s};
    level_[s] = 0;
    for (std::size_t h = 0; h < q.size(); ++h)
      for (const E& e : g_[q[h]])
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[q[h]] + 1;
          q.push_back(e.to);
        }
    return level_[t] >= 0;
  }

  int dfs(std::int32_t v, std::int32_t t, int f) {
    if (v == t) return f;
    for (auto& i = it_[v]; i < g_[v].size(); ++i) {
      E& e = g_[v][i];
      if (e.cap <= 0 || level_[e.to] != level_[v] + 1) continue;
      if (int d = dfs(e.to, t, std::min(f, e.cap))) {
        e.cap -= d;
        g_[e.to][e.rev].cap += d;
        return d;
      }
    }
    return 0;
  }

  std::vector<std::vector<E>> g_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

/// Largest subgraph in which every vertex has at most r/2 chosen out-arcs and
/// r/2 chosen in-arcs of a balanced orientation. When it is r-regular it is
/// an r-factor.
inline std::vector<Edge> oriented_degree_subgraph(const Graph& g, int r) {
  const Vertex n = g.vertex_count();
  const Orientation o = balanced_orientation(g);
  const std::int32_t src = 2 * n, snk = 2 * n + 1;
  Dinic flow(2 * n + 2);
  for (Vertex v = 0; v < n; ++v) {
    flow.add_edge(src, v, r / 2);
    flow.add_edge(n + v, snk, r / 2);
  }
  std::vector<std::size_t> idx(o.arcs.size());
  for (std::size_t i = 0; i < o.arcs.size(); ++i)
    idx[i] = flow.add_edge(o.arcs[i].from, n + o.arcs[i].to, 1);
  flow.max_flow(src, snk);
  std::vector<Edge> chosen;
  for (std::size_t i = 0; i < o.arcs.size(); ++i)
    if (flow.residual(o.arcs[i].from, idx[i]) == 0) chosen.push_back(o.host_edges[i]);
  return chosen;
}

}  // namespace detail

struct FactorExtraction {
  std::optional<Graph> factor;
  bool fast_path = false;          // orientation flow alone produced the factor
  std::size_t gadget_nodes = 0;    // 0 when the gadget was not needed
  std::size_t warm_start_deficit = 0;
};

/**
   Spanning r-regular subgraph of g, or nullopt when none exists.

   For even r a degree-constrained flow over a balanced orientation is tried
   first; whatever it finds seeds the gadget matching, whose blossom search
   decides existence exactly.
 */
inline FactorExtraction extract_r_factor_detailed(const Graph& g, int r) {
  if (r < 0) throw std::invalid_argument("extract_r_factor: negative r");
  const Vertex n = g.vertex_count();
  FactorExtraction out;
  if (r == 0) {
    out.factor = Graph(n);
    out.fast_path = true;
    return out;
  }
  if (static_cast<std::size_t>(r) > g.min_degree() || (static_cast<long long>(r) * n) % 2) return out;

  std::vector<Edge> seed_edges;
  if (r % 2 == 0) {
    seed_edges = detail::oriented_degree_subgraph(g, r);
    if (seed_edges.size() * 2 == static_cast<std::size_t>(r) * static_cast<std::size_t>(n)) {
      out.factor = Graph(n, seed_edges);
      out.fast_path = true;
      return out;
    }
  }

  GadgetGraph gg = build_gadget(g, r);
  out.gadget_nodes = gg.node_count();
  std::vector<std::int32_t> mate(gg.node_count(), -1);
  std::vector<char> chosen_slot(gg.node_count(), 0);
  {
    Graph partial(n, seed_edges);
    for (const auto& c : gg.connectors)
      if (partial.has_edge(c.host_edge.u, c.host_edge.v)) {
        mate[c.a] = c.b;
        mate[c.b] = c.a;
        chosen_slot[c.a] = chosen_slot[c.b] = 1;
      }
    for (Vertex v = 0; v < n; ++v) {
      auto d = static_cast<std::int32_t>(g.degree(v));
      std::int32_t core = gg.core_base[v];
      for (std::int32_t s = 0; s < d && core < gg.core_base[v] + d - r; ++s) {
        std::int32_t slot = gg.slot_base[v] + s;
        if (chosen_slot[slot]) continue;
        mate[slot] = core;
        mate[core] = slot;
        ++core;
      }
    }
  }
  out.warm_start_deficit = static_cast<std::size_t>(std::count(mate.begin(), mate.end(), -1));
  BlossomMatcher bm(gg.adj);
  bm.seed(mate);
  bm.greedy();
  Matching pm = bm.solve(/*stop_on_failure=*/true);
  if (!pm.perfect()) return out;
  out.factor = factor_from_gadget_matching(g, gg, pm.mate);
  return out;
}

inline std::optional<Graph> extract_r_factor(const Graph& g, int r) {
  return extract_r_factor_detailed(g, r).factor;
}

/// Measures |B(A)| against the two size regimes of the boundary-growth bound.
struct BoundaryProbe {
  std::size_t a = 0;
  std::size_t b = 0;
  double min_degree = 0.0;
  bool degenerate = false;  // A covers every vertex
  bool small_regime = false;  // log n / (a p0) >= 7/2
  double bound = 0.0;         // small: a(delta - 6 log n)/(2 log n); large: delta/(7 p0) on 3a+b
  bool bound_holds = false;
  bool g1_consequence_holds = false;  // small: b >= a; large: 3a + b >= n/14
};

inline BoundaryProbe boundary_growth_probe(const Graph& g, std::span<const Vertex> a,
                                           double min_deg, double p0) {
  if (a.empty()) throw std::invalid_argument("boundary_growth_probe: empty set");
  const Vertex n = g.vertex_count();
  BoundaryProbe pr;
  pr.a = a.size();
  pr.b = boundary(g, a).size();
  pr.min_degree = min_deg;
  pr.degenerate = pr.a >= static_cast<std::size_t>(n);
  const double logn = std::log(static_cast<double>(n));
  const double da = static_cast<double>(pr.a), db = static_cast<double>(pr.b);
  pr.small_regime = p0 <= 0.0 || logn / (da * p0) >= 3.5;
  if (pr.small_regime) {
    pr.bound = da * (min_deg - 6.0 * logn) / (2.0 * logn);
    pr.bound_holds = db >= pr.bound;
    pr.g1_consequence_holds = db >= da;
  } else {
    pr.bound = min_deg / (7.0 * p0);
    pr.bound_holds = 3.0 * da + db >= pr.bound;
    pr.g1_consequence_holds = 3.0 * da + db >= n / 14.0;
  }
  return pr;
}

inline void to_json(nlohmann::json& j, const BoundaryProbe& p) {
  j = {{"a", p.a},
       {"b", p.b},
       {"min_degree", p.min_degree},
       {"degenerate", p.degenerate},
       {"regime", p.small_regime ? "small" : "large"},
       {"bound", p.bound},
       {"bound_holds", p.bound_holds},
       {"g1_consequence_holds", p.g1_consequence_holds}};
}

}  // namespace hamdecomp
