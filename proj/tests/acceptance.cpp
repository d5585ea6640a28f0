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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuzz_support.hpp"
#include "hamdecomp/factor.hpp"
#include "hamdecomp/oracles.hpp"
#include "hamdecomp/pipeline.hpp"
#include "hamdecomp/two_factor.hpp"
#include "hamdecomp/verify.hpp"

namespace {

using namespace hamdecomp;

// Pinned thresholds.
constexpr Vertex kE2eN = 1000;
constexpr double kE2eP0 = 0.1;
constexpr double kE2eEta = 0.25;
constexpr int kE2eSeeds = 10;
constexpr int kE2eMinSeeds = 8;
constexpr double kE2eCoverage = 0.70;
constexpr double kE2eSecondsPerSeed = 600.0;
constexpr int kTutteGraphs = 240;
constexpr Vertex kTutteMaxN = 8;
constexpr int kFracsumMaxN = 60;
constexpr int kPermMaxN = 8;
constexpr std::size_t kFuzzMutations = 100000;
constexpr Vertex kConservationN = 500;
constexpr int kConservationRuns = 10;

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int id, bool pass, const std::string& detail) {
  lines.push_back({id, pass, detail});
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::vector<DecompositionResult> run_seeds(Vertex n, double p0, double eta, int seeds, std::vector<Graph>* graphs) {
  std::vector<std::future<std::pair<DecompositionResult, Graph>>> fs;
  for (int s = 1; s <= seeds; ++s)
    fs.push_back(std::async(std::launch::async, [=] {
      Graph g0;
      auto r = run_pipeline(make_params(n, p0, eta, static_cast<std::uint64_t>(s)), {}, &g0);
      return std::make_pair(std::move(r), std::move(g0));
    }));
  std::vector<DecompositionResult> out;
  for (auto& f : fs) {
    auto [r, g] = f.get();
    out.push_back(std::move(r));
    if (graphs) graphs->push_back(std::move(g));
  }
  return out;
}

verify::EdgeListGraph to_edge_list(const Graph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  std::istringstream is(os.str());
  return verify::parse_edge_list(is);
}

void criterion_end_to_end(std::vector<DecompositionResult>& runs, const std::vector<Graph>& graphs) {
  const int need = static_cast<int>(std::ceil((1.0 - kE2eEta) * kE2eN * kE2eP0 / 2.0));
  int good = 0;
  std::ostringstream per;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const bool verified = verify::check(nlohmann::json(r), to_edge_list(graphs[i])).pass;
    const bool ok = r.status == "ok" && verified && static_cast<int>(r.achieved_cycles) >= need &&
                    r.edge_coverage >= kE2eCoverage && r.wall_ms / 1000.0 <= kE2eSecondsPerSeed;
    good += ok;
    char buf[96];
    std::snprintf(buf, sizeof buf, " s%zu:%zu/%.3f/r%d", i + 1, r.achieved_cycles, r.edge_coverage, r.r_achieved);
    per << buf;
  }
  report(1, good >= kE2eMinSeeds,
         "seeds meeting >=" + std::to_string(need) + " cycles & coverage>=0.70: " + std::to_string(good) + "/" +
             std::to_string(runs.size()) + " (need " + std::to_string(kE2eMinSeeds) + ");" + per.str());
}

void criterion_tutte() {
  std::size_t graphs = 0, cases = 0, disagreements = 0, bad_factors = 0;
  Rng rng(20240601);
  while (graphs < kTutteGraphs) {
    const Vertex n = 3 + static_cast<Vertex>(uniform_below(rng, kTutteMaxN - 2));
    const double p = 0.2 + 0.75 * uniform01(rng);
    auto g = sample_gnp(n, p, rng());
    ++graphs;
    for (int r = 1; r < n; ++r) {
      if ((r * n) % 2) continue;
      ++cases;
      auto f = extract_r_factor(g, r);
      const bool tutte = tutte_check_exhaustive(g, r).factor_exists;
      if (f.has_value() != tutte) ++disagreements;
      if (f) {
        bool ok = f->edge_count() * 2 == static_cast<std::size_t>(r * n);
        for (Vertex v = 0; v < n; ++v) ok = ok && f->degree(v) == static_cast<std::size_t>(r);
        for (const Edge& e : f->edges()) ok = ok && g.has_edge(e.u, e.v);
        bad_factors += !ok;
      }
    }
  }
  report(2, disagreements == 0 && bad_factors == 0,
         std::to_string(graphs) + " graphs, " + std::to_string(cases) + " (graph,r) cases, " +
             std::to_string(disagreements) + " disagreements, " + std::to_string(bad_factors) + " invalid factors");
}

bool exact_peel(const Graph& h, std::string& why) {
  const auto r = static_cast<std::size_t>(h.max_degree());
  const Orientation o = euler_orient(h);
  auto in = o.in_degrees(), out = o.out_degrees();
  for (Vertex v = 0; v < h.vertex_count(); ++v)
    if (in[v] != out[v] || static_cast<std::size_t>(2 * in[v]) != h.degree(v)) return why = "orientation", false;
  auto tf = peel_all(h);
  if (tf.factors.size() != r / 2) return why = "factor count", false;
  std::set<std::uint64_t> used;
  for (const auto& f : tf.factors) {
    if (validate_cycle_cover(h, f, true)) return why = "invalid 2-factor", false;
    for (const auto& c : f.cycles)
      if (c.size() < 3) return why = "short cycle", false;
    for (const Edge& e : f.edges())
      if (!used.insert(e.key()).second) return why = "shared edge", false;
  }
  if (used.size() != h.edge_count()) return why = "union differs", false;
  return true;
}

void criterion_peel() {
  std::vector<std::pair<std::string, Graph>> cases{
      {"C6", cycle_graph(6)}, {"K5", complete_graph(5)}, {"K7", complete_graph(7)}};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto p = make_params(400, 0.15, 0.25, seed);
    auto g0 = sample_gnp(p.n, p.p0, substream_seed(seed, 0));
    auto s = split(g0, p, substream_seed(seed, 1));
    if (auto f = largest_even_factor(s.g1, p.r1, 2))
      cases.emplace_back("sampled r=" + std::to_string(f->first), std::move(*f->second.factor));
  }
  std::size_t ok = 0;
  std::string fails;
  for (auto& [name, h] : cases) {
    std::string why;
    if (exact_peel(h, why)) ++ok;
    else fails += " " + name + ":" + why;
  }
  report(3, ok == cases.size() && cases.size() == 8,
         std::to_string(ok) + "/" + std::to_string(cases.size()) + " graphs exact (C6, K5, K7, 5 sampled)" + fails);
}

void criterion_counting() {
  auto fr = fracsum_suite(kFracsumMaxN);
  auto ce = census_suite(8);
  auto pe = perm_suite(kPermMaxN);
  const auto k5 = count_2factors_brute(complete_graph(5)).total;
  const auto k6 = count_2factors_brute(complete_graph(6)).total;
  const bool closed = ordered_2factor_count(5, {5}) == 12 && ordered_2factor_count(6, {6}) == 60 &&
                      ordered_2factor_count(6, {3, 3}) == 20;
  const bool pass = fr.pass() && ce.pass() && pe.pass() && k5 == 12 && k6 == 70 && closed;
  report(4, pass,
         "fracsum " + std::to_string(fr.cases - fr.failures) + "/" + std::to_string(fr.cases) + ", census " +
             std::to_string(ce.cases - ce.failures) + "/" + std::to_string(ce.cases) + ", perm bound " +
             std::to_string(pe.cases - pe.failures) + "/" + std::to_string(pe.cases) +
             " graphs, K5=" + std::to_string(k5) + " K6=" + std::to_string(k6));
}

void criterion_rotation() {
  std::size_t checked = 0, rejected = 0;
  auto fs = testing::fuzz_mutations(kFuzzMutations, 7, [&](const Graph& host, const std::vector<Vertex>& c) {
    ++checked;
    bool ok = verify::check(nlohmann::json{{"cycles", {c}}}, to_edge_list(host)).pass;
    rejected += !ok;
    return ok;
  });

  // Golden fixture.
  const CycleCover tri{{{0, 1, 2}, {3, 4, 5}}};
  Graph g0(6, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {1, 3}, {0, 4}});
  auto conv = convert_all(TwoFactorSet{{tri}}, g0, Graph(6), make_params(6, 0.5, 0.5, 1));
  std::ifstream is(std::string(HAMDECOMP_TEST_DATA) + "/two_triangles.jsonl");
  std::stringstream golden;
  golden << is.rdbuf();
  std::ostringstream produced;
  write_transcript_jsonl(produced, conv.transcript);
  const bool golden_ok = !golden.str().empty() && produced.str() == golden.str();

  const bool pass = fs.failures == 0 && fs.mutations >= kFuzzMutations && fs.hamilton > 0 &&
                    fs.replays == fs.hamilton && rejected == 0 && checked == fs.hamilton && golden_ok;
  report(5, pass,
         std::to_string(fs.mutations) + " mutations (" + std::to_string(fs.rejections) + " rejected calls) over " +
             std::to_string(fs.episodes) + " episodes, " + std::to_string(fs.hamilton) + " cycles replayed and verified" +
             (fs.failures ? ", first failure: " + fs.first_failure : "") +
             ", golden transcript " + (golden_ok ? "matches" : "DIFFERS"));
}

void criterion_conservation(const std::vector<DecompositionResult>& runs) {
  std::size_t checks = 0, steps = 0, bad = 0;
  std::string first;
  for (const auto& r : runs) {
    checks += r.conservation_checks;
    steps += r.steps;
    if (r.status != "ok" || r.conservation_error || r.conservation_checks != r.steps || r.steps == 0) {
      ++bad;
      if (first.empty()) first = r.conservation_error.value_or(r.status + " " + r.error);
    }
  }
  report(6, bad == 0 && runs.size() == kConservationRuns,
         std::to_string(runs.size()) + " runs at n=500, " + std::to_string(checks) + " step audits over " +
             std::to_string(steps) + " steps, " + std::to_string(bad) + " runs with a violation" +
             (first.empty() ? "" : " (" + first + ")"));
}

void criterion_ledger(const std::vector<const std::vector<DecompositionResult>*>& groups) {
  std::size_t steps = 0, untraced = 0, consumed = 0, cap_checked = 0, cap_breaches = 0, over_structural = 0;
  for (const auto* g : groups)
    for (const auto& r : *g) {
      for (const auto& e : r.ledger.entries) {
        ++steps;
        untraced += e.untraced;
        consumed += e.gamma_consumed;
        // Each rotation, absorb and close adds exactly one edge; a reopening close adds two.
        if (e.gamma_consumed > e.rotations + 2) ++over_structural;
        if (r.ledger.step_cap) {
          ++cap_checked;
          if (static_cast<double>(e.gamma_consumed) > *r.ledger.step_cap) ++cap_breaches;
        }
      }
      untraced += r.ledger.untraced_total;
    }
  std::string cap = cap_checked ? std::to_string(cap_breaches) + " cap breaches in " + std::to_string(cap_checked) +
                                      " steps with E0,E1 defined"
                                : "cap 2E0+2E1+2 vacuous (E0,E1 undefined at every tested n)";
  report(7, untraced == 0 && cap_breaches == 0 && over_structural == 0,
         std::to_string(steps) + " report-mode steps consuming " + std::to_string(consumed) + " reservoir edges, " + std::to_string(untraced) + " untraced edges, " +
             std::to_string(over_structural) + " steps above rotations+2, " + cap);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Graph> e2e_graphs;
  auto e2e = run_seeds(kE2eN, kE2eP0, kE2eEta, kE2eSeeds, &e2e_graphs);
  criterion_end_to_end(e2e, e2e_graphs);
  criterion_tutte();
  criterion_peel();
  criterion_counting();
  criterion_rotation();
  auto n500 = run_seeds(kConservationN, kE2eP0, kE2eEta, kConservationRuns, nullptr);
  criterion_conservation(n500);
  criterion_ledger({&e2e, &n500});

  std::size_t passed = 0;
  for (const auto& l : lines) passed += l.pass;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance: %zu/%zu criteria pass (%.1f s)\n", passed, lines.size(), secs);
  return passed == lines.size() ? 0 : 1;
}
