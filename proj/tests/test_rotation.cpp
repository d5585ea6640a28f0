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


#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fuzz_support.hpp"
#include "hamdecomp/factor.hpp"
#include "hamdecomp/rotation.hpp"
#include "hamdecomp/two_factor.hpp"

namespace hamdecomp {
namespace {

const CycleCover kTwoTriangles{{{0, 1, 2}, {3, 4, 5}}};

// Two triangles plus the chords {1,3} and {0,4}.
Graph two_triangles_host() {
  return Graph(6, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {1, 3}, {0, 4}});
}

// Reservoir over `host` with the edges of `held` marked as the current factor.
struct Fixture {
  Graph host;
  EdgeIndex index;
  Reservoir res;
  Fixture(Graph h, const std::vector<Edge>& held) : host(std::move(h)), index(host), res(index) {
    for (const Edge& e : held) res.assign(e.u, e.v, Owner::Current);
  }
};

TEST(Break, TwoTriangles) {
  auto [b, removed] = break_to_path(kTwoTriangles);
  EXPECT_EQ(removed, Edge(0, 1));
  EXPECT_EQ(b.path, (std::vector<Vertex>{0, 2, 1}));
  ASSERT_EQ(b.cycles.size(), 1u);
  EXPECT_EQ(b.cycles[0], (std::vector<Vertex>{3, 4, 5}));
}

TEST(Break, SingleCycleGivesHamiltonPath) {
  auto [b, removed] = break_to_path(CycleCover{{{4, 2, 0, 3, 1}}});
  EXPECT_EQ(removed, Edge(0, 2));
  EXPECT_EQ(b.path, (std::vector<Vertex>{0, 3, 1, 4, 2}));
  EXPECT_TRUE(b.cycles.empty());
}

TEST(Break, RejectsEmpty) { EXPECT_THROW(break_to_path(CycleCover{}), std::invalid_argument); }

TEST(RotatePath, FixedFront) {
  std::vector<Vertex> p{1, 2, 3, 4, 5};
  auto [del, add] = rotate_path(p, 1, FixedEnd::Front);
  EXPECT_EQ(p, (std::vector<Vertex>{1, 2, 5, 4, 3}));
  EXPECT_EQ(del, Edge(2, 3));
  EXPECT_EQ(add, Edge(2, 5));
}

TEST(RotatePath, FixedBack) {
  std::vector<Vertex> p{1, 2, 3, 4, 5};
  auto [del, add] = rotate_path(p, 3, FixedEnd::Back);
  EXPECT_EQ(p, (std::vector<Vertex>{3, 2, 1, 4, 5}));
  EXPECT_EQ(del, Edge(3, 4));
  EXPECT_EQ(add, Edge(1, 4));
}

TEST(RotatePath, RotatingTwiceRestores) {
  std::vector<Vertex> p{0, 1, 2, 3, 4, 5, 6};
  auto q = p;
  rotate_path(q, 2, FixedEnd::Front);
  rotate_path(q, 2, FixedEnd::Front);
  EXPECT_EQ(q, p);
}

TEST(State, RotateMovesEdgesBetweenOwners) {
  BrokenTwoFactor b{{}, {0, 1, 2, 3, 4}};
  Fixture fx(complete_graph(5), b.edges());
  BrokenFactorState st(5, b, &fx.res);
  auto rec = st.rotate(1, FixedEnd::Front);
  EXPECT_EQ(st.path(), (std::vector<Vertex>{0, 1, 4, 3, 2}));
  EXPECT_EQ(rec.kind, MutationKind::Rotate);
  EXPECT_EQ(rec.pivot, 1);
  EXPECT_EQ(*rec.deleted, Edge(1, 2));
  EXPECT_EQ(*rec.added, Edge(1, 4));
  EXPECT_TRUE(fx.res.in_gamma(1, 2));
  EXPECT_FALSE(fx.res.in_gamma(1, 4));
}

TEST(State, RejectsNoOpAndFixedEnd) {
  BrokenTwoFactor b{{}, {0, 1, 2, 3, 4}};
  Fixture fx(complete_graph(5), b.edges());
  BrokenFactorState st(5, b, &fx.res);
  EXPECT_THROW(st.rotate(3, FixedEnd::Front), std::invalid_argument);  // neighbour of the moving end
  EXPECT_THROW(st.rotate(0, FixedEnd::Front), std::invalid_argument);  // the fixed end itself
  EXPECT_THROW(st.rotate(4, FixedEnd::Front), std::invalid_argument);  // the moving end
  EXPECT_THROW(st.rotate(1, FixedEnd::Back), std::invalid_argument);
  EXPECT_EQ(st.path(), b.path);
}

TEST(State, RejectsEdgeOutsideReservoir) {
  BrokenTwoFactor b{{}, {0, 1, 2, 3, 4}};
  Fixture fx(cycle_graph(5), b.edges());
  BrokenFactorState st(5, b, &fx.res);
  EXPECT_THROW(st.rotate(1, FixedEnd::Front), std::invalid_argument);
  EXPECT_EQ(st.path(), b.path);
}

TEST(State, AbsorbSplicesCycle) {
  auto [b, removed] = break_to_path(kTwoTriangles);
  Fixture fx(two_triangles_host(), b.edges());
  BrokenFactorState st(6, b, &fx.res);
  auto rec = st.absorb(1, 3);
  EXPECT_EQ(st.path(), (std::vector<Vertex>{0, 2, 1, 3, 5, 4}));
  EXPECT_EQ(rec.pivot, 3);
  EXPECT_EQ(*rec.deleted, Edge(3, 4));
  EXPECT_EQ(*rec.added, Edge(1, 3));
  EXPECT_TRUE(st.cycles().empty());
  EXPECT_TRUE(st.is_hamilton_path());
}

TEST(State, AbsorbAtFrontReverses) {
  BrokenTwoFactor b{{{3, 4, 5}}, {0, 2, 1}};
  Fixture fx(complete_graph(6), b.edges());
  BrokenFactorState st(6, b, &fx.res);
  st.absorb(0, 4);
  EXPECT_EQ(st.path(), (std::vector<Vertex>{1, 2, 0, 4, 3, 5}));
}

TEST(State, CloseHamiltonPath) {
  BrokenTwoFactor b{{}, {0, 2, 1, 3, 5, 4}};
  Fixture fx(two_triangles_host(), b.edges());
  BrokenFactorState st(6, b, &fx.res);
  auto co = st.close(Edge(0, 4));
  ASSERT_EQ(co.status, CloseOutcome::Status::Hamilton);
  EXPECT_TRUE(verify_hamilton_cycle(fx.host, co.cycle));
  EXPECT_FALSE(fx.res.in_gamma(0, 4));
}

TEST(State, CloseReopensAtEscapeVertex) {
  BrokenTwoFactor b{{{3, 4, 5}}, {0, 2, 1}};
  Fixture fx(two_triangles_host(), b.edges());
  BrokenFactorState st(6, b, &fx.res);
  auto co = st.close(Edge(0, 1));
  ASSERT_EQ(co.status, CloseOutcome::Status::Reopened);
  // 0 reaches 4 through the reservoir; the path now ends at 0.
  EXPECT_EQ(co.escape_from, 0);
  EXPECT_EQ(co.escape_to, 4);
  EXPECT_EQ(st.back(), 0);
  EXPECT_EQ(*co.record->deleted, Edge(0, 2));
  st.absorb(co.escape_from, co.escape_to);
  EXPECT_TRUE(st.is_hamilton_path());
}

TEST(State, CloseDeadEndLeavesStateUntouched) {
  BrokenTwoFactor b{{{3, 4, 5}}, {0, 2, 1}};
  Graph host(6, kTwoTriangles.edges());
  Fixture fx(host, b.edges());
  BrokenFactorState st(6, b, &fx.res);
  auto co = st.close(Edge(0, 1));
  EXPECT_EQ(co.status, CloseOutcome::Status::DeadEnd);
  EXPECT_FALSE(co.record.has_value());
  EXPECT_EQ(st.path(), b.path);
  EXPECT_TRUE(fx.res.in_gamma(0, 1));
}

TEST(Search, ExtendBeforeClose) {
  auto [b, removed] = break_to_path(kTwoTriangles);
  Fixture fx(two_triangles_host(), b.edges());
  BrokenFactorState st(6, b, &fx.res);
  auto so = posa_search(st, fx.res);
  ASSERT_EQ(so.kind, SearchKind::Extend);
  EXPECT_EQ(so.endpoint, 1);
  EXPECT_EQ(so.outside, 3);
  EXPECT_TRUE(so.rotations.empty());
}

TEST(Search, FindsCloseThroughRotation) {
  // Path 0..5 in K6 minus {0,5}: the back must rotate before closing.
  Graph host = complete_graph(6);
  host.remove_edge(0, 5);
  BrokenTwoFactor b{{}, {0, 1, 2, 3, 4, 5}};
  Fixture fx(host, b.edges());
  BrokenFactorState st(6, b, &fx.res);
  auto so = posa_search(st, fx.res);
  ASSERT_EQ(so.kind, SearchKind::Close);
  ASSERT_FALSE(so.rotations.empty());
  for (auto [pivot, fixed] : so.rotations) st.rotate(pivot, fixed);
  EXPECT_EQ(so.closing, Edge(st.front(), st.back()));
  EXPECT_EQ(st.close(so.closing).status, CloseOutcome::Status::Hamilton);
}

TEST(Search, ExhaustedWhenReservoirEmpty) {
  BrokenTwoFactor b{{}, {0, 1, 2, 3, 4}};
  Fixture fx(Graph(5, b.edges()), b.edges());
  BrokenFactorState st(5, b, &fx.res);
  auto so = posa_search(st, fx.res);
  EXPECT_EQ(so.kind, SearchKind::Exhausted);
  EXPECT_FALSE(so.truncated);
}

TEST(Search, RotationLimitTruncates) {
  Graph host = complete_graph(8);
  host.remove_edge(0, 7);
  BrokenTwoFactor b{{}, {0, 1, 2, 3, 4, 5, 6, 7}};
  Fixture fx(host, b.edges());
  BrokenFactorState st(8, b, &fx.res);
  auto so = posa_search(st, fx.res, SearchLimits{20000, 0});
  EXPECT_EQ(so.kind, SearchKind::Exhausted);
  EXPECT_TRUE(so.truncated);
}

TEST(Probe, LevelsGrow) {
  auto g = sample_gnp(60, 0.3, 2);
  std::vector<Vertex> path;
  // Greedy path through g for a realistic start.
  std::vector<char> used(60, 0);
  Vertex v = 0;
  while (true) {
    path.push_back(v);
    used[v] = 1;
    Vertex nxt = -1;
    for (Vertex w : g.neighbors(v))
      if (!used[w]) nxt = w;
    if (nxt < 0) break;
    v = nxt;
  }
  std::vector<Vertex> rest;
  for (Vertex w = 0; w < 60; ++w)
    if (!used[w]) rest.push_back(w);
  if (rest.size() < 3) {
    path.insert(path.end(), rest.begin(), rest.end());
    rest.clear();
  }
  std::vector<Edge> held;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) held.emplace_back(path[i], path[i + 1]);
  Graph host = g;
  for (const Edge& e : held) host.add_edge(e.u, e.v);
  for (std::size_t i = 0; i < rest.size(); ++i) host.add_edge(rest[i], rest[(i + 1) % rest.size()]);
  BrokenTwoFactor b{rest.empty() ? std::vector<std::vector<Vertex>>{} : std::vector<std::vector<Vertex>>{rest},
                    path};
  Fixture fx(host, b.edges());
  BrokenFactorState st(60, b, &fx.res);
  auto p = make_params(60, 0.3, 0.5, 1);
  auto rep = expansion_probe(st, fx.res, &p);
  ASSERT_FALSE(rep.levels.empty());
  for (std::size_t t = 1; t < rep.levels.size(); ++t) EXPECT_GE(rep.levels[t].s_size, rep.levels[t - 1].s_size);
  EXPECT_EQ(rep.levels[0].s_size, 1u);
  EXPECT_DOUBLE_EQ(rep.milestone, 0.5 * 60 / 200.0);
}

TEST(Probe, TrivialPath) {
  BrokenTwoFactor b{{{2, 3, 4}}, {0, 1}};
  Fixture fx(complete_graph(5), b.edges());
  BrokenFactorState st(5, b, &fx.res);
  EXPECT_TRUE(expansion_probe(st, fx.res).trivial);
}

TEST(Transcript, GoldenTwoTriangles) {
  auto g0 = two_triangles_host();
  TwoFactorSet tf{{kTwoTriangles}};
  auto res = convert_all(tf, g0, Graph(6), make_params(6, 0.5, 0.5, 1));
  ASSERT_EQ(res.cycles.size(), 1u);
  EXPECT_TRUE(verify_hamilton_cycle(g0, res.cycles[0]));
  EXPECT_EQ(res.steps, 2u);
  EXPECT_EQ(res.ledger.total_rotations, 0u);

  std::ifstream is(std::string(HAMDECOMP_TEST_DATA) + "/two_triangles.jsonl");
  ASSERT_TRUE(is.good());
  std::stringstream golden;
  golden << is.rdbuf();
  std::ostringstream produced;
  write_transcript_jsonl(produced, res.transcript);
  EXPECT_EQ(produced.str(), golden.str());

  std::istringstream back(golden.str());
  EXPECT_EQ(read_transcript_jsonl(back), res.transcript);
  EXPECT_EQ(replay_factor(kTwoTriangles, res.transcript, 6, &g0), res.cycles[0]);
}

TEST(Convert, HamiltonFactorComesBackUnchanged) {
  auto g0 = complete_graph(7);
  CycleCover ham{{{0, 3, 6, 2, 5, 1, 4}}};
  auto res = convert_all(TwoFactorSet{{ham}}, g0, Graph(7), make_params(7, 1.0, 0.5, 1));
  ASSERT_EQ(res.cycles.size(), 1u);
  EXPECT_EQ(res.ledger.total_rotations, 0u);
  EXPECT_EQ(res.steps, 1u);
  auto keys = [](const std::vector<Edge>& es) {
    std::set<std::uint64_t> k;
    for (const Edge& e : es) k.insert(e.key());
    return k;
  };
  EXPECT_EQ(keys(CycleCover{{res.cycles[0]}}.edges()), keys(ham.edges()));
}

TEST(Transcript, ReplayDetectsTampering) {
  auto g0 = two_triangles_host();
  auto res = convert_all(TwoFactorSet{{kTwoTriangles}}, g0, Graph(6), make_params(6, 0.5, 0.5, 1));
  auto t = res.transcript;
  t[1].deleted = Edge(3, 5);
  EXPECT_THROW(replay_factor(kTwoTriangles, t, 6, &g0), std::invalid_argument);
  auto cut = res.transcript;
  cut.pop_back();
  EXPECT_THROW(replay_factor(kTwoTriangles, cut, 6, &g0), std::invalid_argument);
}

TEST(Transcript, JsonRejectsUnknownKind) {
  std::istringstream is(R"({"step":1,"kind":"teleport","pivot":null,"deleted":null,"added":null})");
  EXPECT_THROW(read_transcript_jsonl(is), std::invalid_argument);
}

TEST(Convert, DeadEndAbandonsFactor) {
  Graph g0(6, kTwoTriangles.edges());
  auto res = convert_all(TwoFactorSet{{kTwoTriangles}}, g0, Graph(6), make_params(6, 0.5, 0.5, 1));
  EXPECT_TRUE(res.cycles.empty());
  // The retry pass finds the same dead end.
  EXPECT_EQ(res.outcomes[0].status, FactorStatus::Abandoned);
  EXPECT_EQ(res.outcomes[0].pass, 2u);
  EXPECT_EQ(res.dead_ends, 2u);
  EXPECT_TRUE(res.transcript.empty());
  EXPECT_FALSE(res.conservation_error.has_value());
}

TEST(Convert, RejectsOverlappingFactors) {
  auto k6 = complete_graph(6);
  TwoFactorSet tf{{kTwoTriangles, kTwoTriangles}};
  EXPECT_THROW(convert_all(tf, k6, Graph(6), make_params(6, 1.0, 0.5, 1)), std::invalid_argument);
}

TEST(Convert, SampledGraphConservesEdges) {
  auto p = make_params(300, 0.15, 0.3, 3);
  auto g0 = sample_gnp(p.n, p.p0, 3);
  auto s = split(g0, p, 4);
  int r = static_cast<int>(s.g1.min_degree()) - 2;
  r -= r % 2;
  auto h = extract_r_factor(s.g1, r);
  ASSERT_TRUE(h.has_value());
  auto tf = peel_all(*h);
  auto res = convert_all(tf, g0, s.g2, p);
  EXPECT_FALSE(res.conservation_error.has_value()) << *res.conservation_error;
  EXPECT_EQ(res.conservation_checks, res.steps);
  EXPECT_EQ(res.ledger.untraced_total, 0u);
  EXPECT_EQ(res.ledger.entries.size(), res.steps);
  std::set<std::uint64_t> used;
  for (const auto& c : res.cycles) {
    EXPECT_TRUE(verify_hamilton_cycle(g0, c));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_TRUE(used.insert(Edge(c[i], c[(i + 1) % c.size()]).key()).second);
  }
  for (const auto& [fi, recs] : split_transcript(res.transcript)) {
    ASSERT_TRUE(res.outcomes[fi].cycle_index.has_value());
    EXPECT_EQ(replay_factor(tf.factors[fi], recs, p.n, &g0), res.cycles[*res.outcomes[fi].cycle_index]);
  }
}

TEST(Fuzz, RandomMutationsKeepInvariants) {
  auto fs = testing::fuzz_mutations(20000, 99);
  EXPECT_EQ(fs.failures, 0u) << fs.first_failure;
  EXPECT_GE(fs.mutations, 20000u);
  EXPECT_GT(fs.hamilton, 0u);
  EXPECT_EQ(fs.replays, fs.hamilton);
}

}  // namespace
}  // namespace hamdecomp
