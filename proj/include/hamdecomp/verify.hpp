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

// Stand-alone re-audit of a serialized result against a serialized graph.
// Deliberately self-contained: only the standard library and the JSON reader.

#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hamdecomp::verify {

struct Verdict {
  bool pass = false;
  std::size_t cycles_checked = 0;
  std::string failure;  // missing_edge | repeated_vertex | missing_vertex | vertex_range | shared_edge | count_mismatch | parse
  long cycle_index = -1;
  std::string witness;
  std::string message;
};

struct EdgeListGraph {
  long n = 0;
  std::unordered_set<std::uint64_t> edges;

  static std::uint64_t key(long a, long b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }
  bool has(long a, long b) const { return edges.count(key(a, b)) > 0; }
};

/// Parses "n m" then m pairs; '#' lines are comments.
inline EdgeListGraph parse_edge_list(std::istream& is) {
  EdgeListGraph g;
  std::string line;
  bool header = false;
  long m = 0, seen = 0;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!header) {
      if (!(ls >> g.n >> m) || g.n < 0 || m < 0) throw std::runtime_error("bad edge-list header");
      header = true;
      continue;
    }
    long a = 0, b = 0;
    if (!(ls >> a >> b) || a < 0 || b < 0 || a >= g.n || b >= g.n || a == b)
      throw std::runtime_error("bad edge line: " + line);
    g.edges.insert(EdgeListGraph::key(a, b));
    ++seen;
  }
  if (!header) throw std::runtime_error("missing edge-list header");
  if (seen != m) throw std::runtime_error("edge count does not match header");
  return g;
}

inline std::string pair_str(long a, long b) {
  if (a > b) std::swap(a, b);
  return "{" + std::to_string(a) + "," + std::to_string(b) + "}";
}

/// Checks every cycle in result["cycles"]: spans all n vertices exactly once,
/// uses only graph edges, shares no edge with an earlier cycle. Also checks
/// result["achieved_cycles"] when present.
inline Verdict check(const nlohmann::json& result, const EdgeListGraph& g) {
  Verdict v;
  auto fail = [&](std::string kind, long idx, std::string witness, std::string msg) {
    v.pass = false;
    v.failure = std::move(kind);
    v.cycle_index = idx;
    v.witness = std::move(witness);
    v.message = std::move(msg);
    return v;
  };
  if (!result.contains("cycles") || !result["cycles"].is_array())
    return fail("parse", -1, "", "result has no cycles array");
  const auto& cycles = result["cycles"];
  std::map<std::uint64_t, long> owner;
  for (std::size_t ci = 0; ci < cycles.size(); ++ci) {
    const auto idx = static_cast<long>(ci);
    std::vector<long> cyc;
    try {
      cyc = cycles[ci].get<std::vector<long>>();
    } catch (const std::exception&) {
      return fail("parse", idx, "", "cycle is not an integer list");
    }
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    for (long x : cyc) {
      if (x < 0 || x >= g.n) return fail("vertex_range", idx, std::to_string(x), "vertex out of range");
      if (seen[x]++) return fail("repeated_vertex", idx, std::to_string(x), "vertex visited twice");
    }
    for (long x = 0; x < g.n; ++x)
      if (!seen[x]) return fail("missing_vertex", idx, std::to_string(x), "vertex not visited");
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const long a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      if (!g.has(a, b)) return fail("missing_edge", idx, pair_str(a, b), "pair is not a graph edge");
      auto [it, fresh] = owner.emplace(EdgeListGraph::key(a, b), idx);
      if (!fresh)
        return fail("shared_edge", idx, pair_str(a, b), "edge already used by cycle " + std::to_string(it->second));
    }
    ++v.cycles_checked;
  }
  if (result.contains("achieved_cycles") && result["achieved_cycles"].get<long>() != static_cast<long>(cycles.size()))
    return fail("count_mismatch", -1, std::to_string(cycles.size()), "achieved_cycles differs from cycles listed");
  v.pass = true;
  return v;
}

inline nlohmann::json to_json(const Verdict& v) {
  return {{"pass", v.pass},
          {"cycles_checked", v.cycles_checked},
          {"failure", v.failure},
          {"cycle_index", v.cycle_index},
          {"witness", v.witness},
          {"message", v.message}};
}

}  // namespace hamdecomp::verify
