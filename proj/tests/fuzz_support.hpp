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

// Randomized mutation driver shared by the rotation tests and the
// acceptance binary.

#include <functional>
#include <string>
#include <vector>

#include "hamdecomp/rotation.hpp"
#include "hamdecomp/sampler.hpp"

namespace hamdecomp::testing {

struct FuzzStats {
  std::size_t mutations = 0;
  std::size_t rejections = 0;
  std::size_t episodes = 0;
  std::size_t hamilton = 0;
  std::size_t replays = 0;
  std::size_t failures = 0;
  std::string first_failure;
};

/// Random spanning 2-factor: a shuffled vertex order cut into cycles of length >= 3.
inline CycleCover random_two_factor(Vertex n, Rng& rng) {
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) perm[v] = v;
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  CycleCover cc;
  std::size_t at = 0;
  while (at < perm.size()) {
    std::size_t left = perm.size() - at;
    std::size_t len = left < 6 ? left : 3 + uniform_below(rng, left - 5);
    if (left - len < 3) len = left;
    cc.cycles.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(at),
                           perm.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  return cc;
}

/// Applies random rotate / absorb / close calls until `target` mutations
/// succeeded, checking structure and edge ownership after each one and
/// replaying every completed Hamilton cycle from its records.
using CycleCheck = std::function<bool(const Graph&, const std::vector<Vertex>&)>;

inline FuzzStats fuzz_mutations(std::size_t target, std::uint64_t seed, const CycleCheck& extra = {}) {
  FuzzStats fs;
  Rng rng(seed);
  auto fail = [&](const std::string& what) {
    if (fs.failures++ == 0) fs.first_failure = what;
  };
  while (fs.mutations < target && fs.failures == 0) {
    ++fs.episodes;
    const Vertex n = 6 + static_cast<Vertex>(uniform_below(rng, 25));
    const CycleCover initial = random_two_factor(n, rng);
    auto es = sample_gnp_edges(n, 0.2 + 0.5 * uniform01(rng), rng());
    for (const Edge& e : initial.edges()) es.push_back(e);
    const Graph host(n, es);
    const EdgeIndex index(host);
    Reservoir res(index);
    for (const Edge& e : initial.edges()) res.assign(e.u, e.v, Owner::Current);
    auto [broken, removed] = break_to_path(initial);
    res.assign(removed.u, removed.v, Owner::Gamma);
    std::vector<Mutation> records{Mutation{0, 0, MutationKind::Break, -1, removed, std::nullopt}};
    BrokenFactorState st(n, std::move(broken), &res, &host);

    auto check = [&](std::size_t expect_edges) {
      if (auto err = validate_broken_two_factor(n, st.snapshot(), &host)) return fail("structure: " + *err);
      std::size_t current = 0;
      for (EdgeId i = 0; i < index.size(); ++i) current += res.owner(i) == Owner::Current;
      if (current != expect_edges) return fail("ownership count " + std::to_string(current));
      for (const Edge& e : st.edges())
        if (res.owner(index.require(e.u, e.v)) != Owner::Current) return fail("state edge not held");
    };

    for (int op = 0; op < 400 && fs.mutations < target && fs.failures == 0; ++op) {
      const auto before = st.snapshot();
      const auto kind = uniform_below(rng, 10);
      try {
        if (kind < 6) {
          const Vertex pivot = st.path()[uniform_below(rng, st.path().size())];
          records.push_back(st.rotate(pivot, uniform_below(rng, 2) ? FixedEnd::Front : FixedEnd::Back));
        } else if (kind < 8) {
          if (st.cycles().empty()) continue;
          const auto& cyc = st.cycles()[uniform_below(rng, st.cycles().size())];
          const Vertex entry = cyc[uniform_below(rng, cyc.size())];
          records.push_back(st.absorb(uniform_below(rng, 2) ? st.front() : st.back(), entry));
        } else {
          if (st.path().size() < 3 || !res.in_gamma(st.front(), st.back())) continue;
          auto co = st.close(Edge(st.front(), st.back()));
          if (co.status == CloseOutcome::Status::DeadEnd) {
            if (st.snapshot().path != before.path) fail("dead end changed the state");
            continue;
          }
          records.push_back(*co.record);
          ++fs.mutations;
          if (co.status == CloseOutcome::Status::Hamilton) {
            ++fs.hamilton;
            if (!verify_hamilton_cycle(host, co.cycle)) fail("closed cycle is not Hamilton");
            if (extra && !extra(host, co.cycle)) fail("external check rejected a cycle");
            try {
              ++fs.replays;
              if (replay_factor(initial, records, n, &host) != co.cycle) fail("replay differs");
            } catch (const std::exception& e) {
              fail(std::string("replay threw: ") + e.what());
            }
            break;
          }
          check(st.edges().size());
          continue;
        }
        ++fs.mutations;
        check(st.edges().size());
      } catch (const std::invalid_argument&) {
        ++fs.rejections;
        const auto after = st.snapshot();
        if (after.path != before.path || after.cycles != before.cycles) fail("rejected call changed the state");
      }
    }
  }
  return fs;
}

}  // namespace hamdecomp::testing
