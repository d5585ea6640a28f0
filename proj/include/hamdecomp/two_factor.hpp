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
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamdecomp/graph.hpp"
#include "hamdecomp/matching.hpp"
#include "hamdecomp/orientation.hpp"
#include "hamdecomp/sampler.hpp"

namespace hamdecomp {

/**
   Bipartite graph on two copies X, Y of the host vertex set with an edge
   (x, y) for every arc x -> y of an orientation. Perfect matchings are
   permutations, and each one is a spanning cycle cover of the host.
 */
struct BipartiteDouble {
  Vertex n = 0;
  AdjacencyList out;                          // out[x] = sorted heads y
  std::vector<std::vector<Edge>> host_edge;   // parallel to `out`

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& o : out) c += o.size();
    return c;
  }

  /// Common degree of every X and Y node, or -1 when irregular.
  int regular_degree() const {
    std::vector<int> in(static_cast<std::size_t>(n), 0);
    for (const auto& o : out)
      for (auto y : o) ++in[y];
    if (n == 0) return 0;
    const int d = static_cast<int>(out[0].size());
    for (Vertex v = 0; v < n; ++v)
      if (static_cast<int>(out[v].size()) != d || in[v] != d) return -1;
    return d;
  }
};

inline BipartiteDouble bipartite_double(const Orientation& o) {
  BipartiteDouble b;
  b.n = o.n;
  b.out.resize(static_cast<std::size_t>(o.n));
  b.host_edge.resize(static_cast<std::size_t>(o.n));
  std::vector<Arc> arcs = o.arcs;
  std::sort(arcs.begin(), arcs.end(),
            [](const Arc& a, const Arc& c) { return a.from != c.from ? a.from < c.from : a.to < c.to; });
  for (const Arc& a : arcs) {
    b.out[a.from].push_back(a.to);
    b.host_edge[a.from].emplace_back(a.from, a.to);
  }
  return b;
}

/// Perfect matching of a d-regular double (d >= 1); match[x] = y.
inline std::vector<std::int32_t> bipartite_perfect_matching(const BipartiteDouble& b) {
  const int d = b.regular_degree();
  if (d < 1) throw std::invalid_argument("bipartite_perfect_matching: double is not d-regular with d >= 1");
  HopcroftKarp hk(b.out, b.n);
  if (hk.solve() != static_cast<std::size_t>(b.n))
    throw std::logic_error("bipartite_perfect_matching: regular double without perfect matching");
  return hk.match_left();
}

/// Follows the permutation x -> match[x]; cycles start at their smallest vertex.
inline CycleCover matching_to_2factor(const std::vector<std::int32_t>& match, const BipartiteDouble& b) {
  if (match.size() != static_cast<std::size_t>(b.n)) throw std::invalid_argument("matching size mismatch");
  CycleCover cc;
  std::vector<char> seen(static_cast<std::size_t>(b.n), 0);
  for (Vertex s = 0; s < b.n; ++s) {
    if (seen[s]) continue;
    std::vector<Vertex> cyc;
    for (Vertex x = s; !seen[x]; x = match[x]) {
      if (match[x] < 0) throw std::invalid_argument("matching is not perfect");
      seen[x] = 1;
      cyc.push_back(x);
    }
    if (cyc.size() < 3) throw std::logic_error("cycle of length < 3 from a bipartite double");
    cc.cycles.push_back(std::move(cyc));
  }
  return cc;
}

struct TwoFactorSet {
  std::vector<CycleCover> factors;

  std::vector<std::size_t> cycle_counts() const {
    std::vector<std::size_t> c;
    for (const auto& f : factors) c.push_back(f.cycle_count());
    return c;
  }
};

/// Splits an r-regular graph (r even) into exactly r/2 edge-disjoint
/// 2-factors by peeling perfect matchings off its bipartite double.
inline TwoFactorSet peel_all(const Graph& h) {
  const Vertex n = h.vertex_count();
  const auto r = static_cast<int>(h.max_degree());
  if (static_cast<int>(h.min_degree()) != r) throw std::invalid_argument("peel_all: graph is not regular");
  if (r % 2) throw std::invalid_argument("peel_all: degree must be even");
  const Orientation o = euler_orient(h);
  if (auto err = check_euler_orientation(h, o)) throw std::logic_error("euler_orient: " + *err);
  BipartiteDouble b = bipartite_double(o);
  TwoFactorSet out;
  for (int d = r / 2; d >= 1; --d) {
    if (b.regular_degree() != d)
      throw std::logic_error("peel_all: double is not " + std::to_string(d) + "-regular");
    auto match = bipartite_perfect_matching(b);
    out.factors.push_back(matching_to_2factor(match, b));
    for (Vertex x = 0; x < n; ++x) {
      auto& ys = b.out[x];
      auto it = std::find(ys.begin(), ys.end(), match[x]);
      b.host_edge[x].erase(b.host_edge[x].begin() + (it - ys.begin()));
      ys.erase(it);
    }
  }
  if (b.edge_count() != 0) throw std::logic_error("peel_all: edges left over");
  return out;
}

struct CycleStatistics {
  std::vector<std::size_t> counts;
  std::size_t min = 0;
  double median = 0.0;
  std::size_t max = 0;
  double k0 = 0.0;
  double fraction_within_k0 = 0.0;
};

inline CycleStatistics cycle_statistics(const TwoFactorSet& tf, const Params& params) {
  CycleStatistics s;
  s.counts = tf.cycle_counts();
  s.k0 = params.k0;
  if (s.counts.empty()) return s;
  auto sorted = s.counts;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t k = sorted.size();
  s.median = k % 2 ? static_cast<double>(sorted[k / 2])
                   : 0.5 * static_cast<double>(sorted[k / 2 - 1] + sorted[k / 2]);
  const auto within = std::count_if(sorted.begin(), sorted.end(),
                                    [&](std::size_t c) { return static_cast<double>(c) <= s.k0; });
  s.fraction_within_k0 = static_cast<double>(within) / static_cast<double>(k);
  return s;
}

inline void to_json(nlohmann::json& j, const CycleStatistics& s) {
  j = {{"counts", s.counts}, {"min", s.min},  {"median", s.median},
       {"max", s.max},       {"k0", s.k0},    {"fraction_within_k0", s.fraction_within_k0}};
}

// TwoFactorSet wire format: array of factors, each an array of cycles, each
// cycle an array of vertex ids.
inline void to_json(nlohmann::json& j, const TwoFactorSet& tf) {
  j = nlohmann::json::array();
  for (const auto& f : tf.factors) j.push_back(f.cycles);
}

inline void from_json(const nlohmann::json& j, TwoFactorSet& tf) {
  tf.factors.clear();
  for (const auto& f : j) tf.factors.push_back(CycleCover{f.get<std::vector<std::vector<Vertex>>>()});
}

}  // namespace hamdecomp
