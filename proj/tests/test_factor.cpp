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


#include <bit>

#include <gtest/gtest.h>

#include "hamdecomp/factor.hpp"
#include "hamdecomp/sampler.hpp"

namespace hamdecomp {
namespace {

bool is_r_factor(const Graph& host, const Graph& f, int r) {
  if (f.vertex_count() != host.vertex_count()) return false;
  for (Vertex v = 0; v < f.vertex_count(); ++v)
    if (f.degree(v) != static_cast<std::size_t>(r)) return false;
  for (const Edge& e : f.edges())
    if (!host.has_edge(e.u, e.v)) return false;
  return true;
}

// Existence of an r-factor by trying every edge subset.
bool brute_factor_exists(const Graph& g, int r) {
  auto es = g.edges();
  const Vertex n = g.vertex_count();
  if (es.size() > 22) throw std::invalid_argument("too many edges for brute force");
  for (std::uint32_t mask = 0; mask < (1u << es.size()); ++mask) {
    if (std::popcount(mask) * 2 != r * n) continue;
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < es.size(); ++i)
      if (mask >> i & 1u) ++deg[es[i].u], ++deg[es[i].v];
    if (std::all_of(deg.begin(), deg.end(), [&](int d) { return d == r; })) return true;
  }
  return false;
}

TEST(Tutte, Examples) {
  EXPECT_TRUE(tutte_check_exhaustive(complete_graph(4), 3).factor_exists);
  Graph star(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
  auto v = tutte_check_exhaustive(star, 1);
  EXPECT_FALSE(v.factor_exists);
  ASSERT_TRUE(v.violation.has_value());
  EXPECT_LT(v.violation->R, v.violation->Q);
  EXPECT_TRUE(tutte_check_exhaustive(cycle_graph(6), 2).factor_exists);
  EXPECT_TRUE(tutte_check_exhaustive(cycle_graph(6), 1).factor_exists);
  EXPECT_FALSE(tutte_check_exhaustive(cycle_graph(5), 1).factor_exists);
}

TEST(Tutte, ExhaustiveAgreesWithDirectEvaluation) {
  Graph star(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
  auto v = tutte_check_exhaustive(star, 1);
  ASSERT_TRUE(v.violation.has_value());
  auto q = tutte_quantities(star, 1, v.violation->partition);
  EXPECT_EQ(q.R, v.violation->R);
  EXPECT_EQ(q.Q, v.violation->Q);
  EXPECT_FALSE(q.satisfied());
}

TEST(Tutte, RejectsLargeGraphs) {
  EXPECT_THROW(tutte_check_exhaustive(complete_graph(13), 2), std::invalid_argument);
}

TEST(Tutte, CountsAllPartitions) {
  EXPECT_EQ(tutte_check_exhaustive(complete_graph(5), 2).partitions_checked, 243u);
}

TEST(Gadget, NodeCounts) {
  auto c6 = build_gadget(cycle_graph(6), 2);
  EXPECT_EQ(c6.node_count(), 12u);
  EXPECT_EQ(c6.connectors.size(), 6u);
  auto k4 = build_gadget(complete_graph(4), 1);
  EXPECT_EQ(k4.node_count(), 20u);
  // connectors + per-vertex core-slot bicliques
  EXPECT_EQ(k4.edge_count(), 6u + 4u * 2u * 3u);
}

TEST(Gadget, RejectsDegreeAboveMinimum) {
  EXPECT_THROW(build_gadget(cycle_graph(6), 3), std::invalid_argument);
}

TEST(Gadget, MatchingDecodesToFactor) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Vertex n = 4 + static_cast<Vertex>(seed % 3);
    auto g = sample_gnp(n, 0.7, seed);
    for (int r = 1; r <= static_cast<int>(g.min_degree()); ++r) {
      auto gg = build_gadget(g, r);
      BlossomMatcher bm(gg.adj);
      auto m = bm.solve();
      EXPECT_EQ(m.perfect(), brute_factor_exists(g, r)) << "seed " << seed << " r " << r;
      if (m.perfect()) {
        EXPECT_TRUE(is_r_factor(g, factor_from_gadget_matching(g, gg, m.mate), r));
      }
    }
  }
}

TEST(Extract, Examples) {
  auto k5 = complete_graph(5);
  auto f4 = extract_r_factor(k5, 4);
  ASSERT_TRUE(f4.has_value());
  EXPECT_EQ(*f4, k5);
  auto f2 = extract_r_factor(k5, 2);
  ASSERT_TRUE(f2.has_value());
  EXPECT_TRUE(is_r_factor(k5, *f2, 2));
  EXPECT_FALSE(extract_r_factor(k5, 1).has_value());  // odd n
  auto c6 = extract_r_factor(cycle_graph(6), 2);
  ASSERT_TRUE(c6.has_value());
  EXPECT_EQ(*c6, cycle_graph(6));
  EXPECT_FALSE(extract_r_factor(cycle_graph(6), 3).has_value());
  EXPECT_EQ(extract_r_factor(cycle_graph(6), 0)->edge_count(), 0u);
  EXPECT_THROW(extract_r_factor(k5, -2), std::invalid_argument);
}

TEST(Extract, AgreesWithTutteOnRandomSmallGraphs) {
  std::size_t graphs = 0, cases = 0;
  for (std::uint64_t seed = 0; graphs < 250; ++seed) {
    const Vertex n = 3 + static_cast<Vertex>(seed % 6);
    auto g = sample_gnp(n, 0.35 + 0.1 * static_cast<double>(seed % 6), 1000 + seed);
    ++graphs;
    for (int r = 1; r <= static_cast<int>(g.min_degree()); ++r) {
      ++cases;
      auto f = extract_r_factor(g, r);
      bool tutte = tutte_check_exhaustive(g, r).factor_exists;
      EXPECT_EQ(f.has_value(), tutte) << "seed " << seed << " r " << r;
      if (g.edge_count() <= 20) {
        EXPECT_EQ(tutte, brute_factor_exists(g, r));
      }
      if (f) {
        EXPECT_TRUE(is_r_factor(g, *f, r));
      }
    }
  }
  EXPECT_GE(cases, 200u);
}

TEST(Extract, EvenFactorOfSampledGraph) {
  auto g = sample_gnp(600, 0.1, 21);
  int r = static_cast<int>(g.min_degree()) - 10;
  r -= r % 2;
  auto f = extract_r_factor_detailed(g, r);
  ASSERT_TRUE(f.factor.has_value());
  EXPECT_TRUE(is_r_factor(g, *f.factor, r));
}

TEST(Extract, OddFactorOfSampledGraph) {
  auto g = sample_gnp(200, 0.1, 4);
  auto f = extract_r_factor(g, 3);
  ASSERT_TRUE(f.has_value());
  EXPECT_TRUE(is_r_factor(g, *f, 3));
}

TEST(BoundaryProbe, SmallAndLargeRegimes) {
  auto g = sample_gnp(500, 0.1, 2);
  VertexSet one{0};
  auto small = boundary_growth_probe(g, one, static_cast<double>(g.min_degree()), 0.1);
  EXPECT_TRUE(small.small_regime);
  EXPECT_EQ(small.b, g.degree(0));
  VertexSet many;
  for (Vertex v = 0; v < 200; ++v) many.push_back(v);
  auto large = boundary_growth_probe(g, many, static_cast<double>(g.min_degree()), 0.1);
  EXPECT_FALSE(large.small_regime);
  EXPECT_EQ(large.b, boundary(g, many).size());
  EXPECT_TRUE(large.g1_consequence_holds);
  EXPECT_THROW(boundary_growth_probe(g, VertexSet{}, 1.0, 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace hamdecomp
