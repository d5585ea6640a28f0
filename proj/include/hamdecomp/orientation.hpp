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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamdecomp/graph.hpp"

namespace hamdecomp {

struct Arc {
  Vertex from = 0;
  Vertex to = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Direction for every host edge; arcs[i] orients host_edges[i].
struct Orientation {
  Vertex n = 0;
  std::vector<Edge> host_edges;
  std::vector<Arc> arcs;

  std::vector<int> out_degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n), 0);
    for (const Arc& a : arcs) ++d[a.from];
    return d;
  }
  std::vector<int> in_degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n), 0);
    for (const Arc& a : arcs) ++d[a.to];
    return d;
  }
};

/// in(v) == out(v) == deg(v)/2 for every v, and arcs biject with host edges.
inline std::optional<std::string> check_euler_orientation(const Graph& host, const Orientation& o) {
  if (o.n != host.vertex_count()) return "vertex count mismatch";
  if (o.arcs.size() != host.edge_count() || o.host_edges.size() != o.arcs.size())
    return "arc count differs from edge count";
  for (std::size_t i = 0; i < o.arcs.size(); ++i) {
    if (Edge(o.arcs[i].from, o.arcs[i].to) != o.host_edges[i]) return "arc does not match edge";
    if (!host.has_edge(o.arcs[i].from, o.arcs[i].to)) return "arc is not a host edge";
    if (i > 0 && !(o.host_edges[i - 1] < o.host_edges[i])) return "host edges repeated";
  }
  auto in = o.in_degrees(), out = o.out_degrees();
  for (Vertex v = 0; v < o.n; ++v) {
    auto d = static_cast<int>(host.degree(v));
    if (in[v] != out[v] || 2 * in[v] != d)
      return "vertex " + std::to_string(v) + " unbalanced";
  }
  return std::nullopt;
}

namespace detail {

/// Orients every edge along the closed trails Hierholzer's walk produces.
/// All degrees of the (multi)graph given by `edges` on `n` vertices must be
/// even. Returns, per edge, whether it is traversed from .u to .v.
inline std::vector<char> trail_orientation(Vertex n, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> inc(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    inc[edges[i].u].push_back({edges[i].v, i});
    inc[edges[i].v].push_back({edges[i].u, i});
  }
  std::vector<char> used(edges.size(), 0), forward(edges.size(), 0);
  std::vector<std::size_t> ptr(static_cast<std::size_t>(n), 0);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex v = stack.back();
      auto& p = ptr[v];
      while (p < inc[v].size() && used[inc[v][p].second]) ++p;
      if (p == inc[v].size()) {
        stack.pop_back();
        continue;
      }
      auto [w, id] = inc[v][p];
      used[id] = 1;
      forward[id] = edges[id].u == v;
      stack.push_back(w);
    }
  }
  return forward;
}

}  // namespace detail

/// Euler orientation: every vertex gets in-degree = out-degree = deg/2.
/// Runs per connected component. Rejects graphs with an odd-degree vertex.
inline Orientation euler_orient(const Graph& h) {
  for (Vertex v = 0; v < h.vertex_count(); ++v)
    if (h.degree(v) % 2 != 0)
      throw std::invalid_argument("euler_orient: vertex " + std::to_string(v) + " has odd degree");
  Orientation o;
  o.n = h.vertex_count();
  o.host_edges = h.edges();
  auto fwd = detail::trail_orientation(o.n, o.host_edges);
  o.arcs.reserve(o.host_edges.size());
  for (std::size_t i = 0; i < o.host_edges.size(); ++i) {
    const Edge& e = o.host_edges[i];
    o.arcs.push_back(fwd[i] ? Arc{e.u, e.v} : Arc{e.v, e.u});
  }
  return o;
}

/// Orientation with |in(v) - out(v)| <= 1 for every vertex, for arbitrary
/// degrees: odd vertices are paired through an auxiliary vertex first.
inline Orientation balanced_orientation(const Graph& g) {
  const Vertex n = g.vertex_count();
  std::vector<Edge> es = g.edges();
  const std::size_t real = es.size();
  for (Vertex v = 0; v < n; ++v)
    if (g.degree(v) % 2) es.emplace_back(v, n);
  auto fwd = detail::trail_orientation(n + 1, es);
  Orientation o;
  o.n = n;
  o.host_edges.assign(es.begin(), es.begin() + static_cast<std::ptrdiff_t>(real));
  for (std::size_t i = 0; i < real; ++i)
    o.arcs.push_back(fwd[i] ? Arc{es[i].u, es[i].v} : Arc{es[i].v, es[i].u});
  return o;
}

}  // namespace hamdecomp
