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
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamdecomp/graph.hpp"
#include "hamdecomp/reservoir.hpp"
#include "hamdecomp/sampler.hpp"
#include "hamdecomp/two_factor.hpp"

namespace hamdecomp {

enum class FixedEnd : std::uint8_t { Front, Back };

enum class MutationKind : std::uint8_t { Break, Rotate, Absorb, Close };

inline const char* mutation_kind_name(MutationKind k) {
  switch (k) {
    case MutationKind::Break: return "break";
    case MutationKind::Rotate: return "rotate";
    case MutationKind::Absorb: return "absorb";
    case MutationKind::Close: return "close";
  }
  return "?";
}

/// One transcript record. `pivot` is -1 when the kind has none.
struct Mutation {
  std::size_t step = 0;
  std::size_t factor = 0;
  MutationKind kind = MutationKind::Break;
  Vertex pivot = -1;
  std::optional<Edge> deleted;
  std::optional<Edge> added;

  friend bool operator==(const Mutation&, const Mutation&) = default;
};

inline void to_json(nlohmann::json& j, const Mutation& m) {
  auto edge = [](const std::optional<Edge>& e) {
    return e ? nlohmann::json::array({e->u, e->v}) : nlohmann::json(nullptr);
  };
  j = nlohmann::json{{"step", m.step},
                     {"factor", m.factor},
                     {"kind", mutation_kind_name(m.kind)},
                     {"pivot", m.pivot < 0 ? nlohmann::json(nullptr) : nlohmann::json(m.pivot)},
                     {"deleted", edge(m.deleted)},
                     {"added", edge(m.added)}};
}

inline void from_json(const nlohmann::json& j, Mutation& m) {
  auto edge = [](const nlohmann::json& e) -> std::optional<Edge> {
    if (e.is_null()) return std::nullopt;
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair");
    return Edge(e[0].get<Vertex>(), e[1].get<Vertex>());
  };
  m.step = j.at("step").get<std::size_t>();
  m.factor = j.value("factor", std::size_t{0});
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "break") m.kind = MutationKind::Break;
  else if (kind == "rotate") m.kind = MutationKind::Rotate;
  else if (kind == "absorb") m.kind = MutationKind::Absorb;
  else if (kind == "close") m.kind = MutationKind::Close;
  else throw std::invalid_argument("unknown mutation kind: " + kind);
  m.pivot = j.at("pivot").is_null() ? -1 : j.at("pivot").get<Vertex>();
  m.deleted = edge(j.at("deleted"));
  m.added = edge(j.at("added"));
}

inline void write_transcript_jsonl(std::ostream& os, std::span<const Mutation> records) {
  for (const auto& m : records) os << nlohmann::json(m).dump() << '\n';
}

inline std::vector<Mutation> read_transcript_jsonl(std::istream& is) {
  std::vector<Mutation> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(nlohmann::json::parse(line).get<Mutation>());
  }
  return out;
}

/// Removes the lexicographically smallest edge of the cycle through the
/// smallest vertex. The path starts at that edge's u and walks away from v.
inline std::pair<BrokenTwoFactor, Edge> break_to_path(const CycleCover& f) {
  if (f.cycles.empty()) throw std::invalid_argument("break_to_path: no cycles");
  std::size_t ci = 0;
  Vertex best = -1;
  for (std::size_t i = 0; i < f.cycles.size(); ++i) {
    if (f.cycles[i].size() < 3) throw std::invalid_argument("break_to_path: cycle shorter than 3");
    Vertex lo = *std::min_element(f.cycles[i].begin(), f.cycles[i].end());
    if (best < 0 || lo < best) {
      best = lo;
      ci = i;
    }
  }
  const auto& c = f.cycles[ci];
  const std::size_t len = c.size();
  std::size_t at = 0;
  Edge removed(c[0], c[1]);
  for (std::size_t i = 0; i < len; ++i) {
    Edge e(c[i], c[(i + 1) % len]);
    if (e < removed) {
      removed = e;
      at = i;
    }
  }
  // The removed edge joins c[at] and c[at+1].
  const std::size_t iu = c[at] == removed.u ? at : (at + 1) % len;
  const bool forward = c[(iu + 1) % len] != removed.v;
  BrokenTwoFactor b;
  for (std::size_t s = 0; s < len; ++s)
    b.path.push_back(forward ? c[(iu + s) % len] : c[(iu + len - s) % len]);
  for (std::size_t i = 0; i < f.cycles.size(); ++i)
    if (i != ci) b.cycles.push_back(f.cycles[i]);
  return {std::move(b), removed};
}

/// Applies a rotation in place. With the front fixed, pivot index i joins
/// the back endpoint and the segment after i is reversed; with the back
/// fixed, the mirror image. Returns {deleted, added}.
inline std::pair<Edge, Edge> rotate_path(std::vector<Vertex>& path, std::size_t i, FixedEnd fixed) {
  const std::size_t len = path.size();
  if (fixed == FixedEnd::Front) {
    if (i < 1 || i + 2 >= len) throw std::invalid_argument("rotate: pivot index out of range");
    Edge deleted(path[i], path[i + 1]), added(path[i], path.back());
    std::reverse(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, path.end());
    return {deleted, added};
  }
  if (i < 2 || i + 1 >= len) throw std::invalid_argument("rotate: pivot index out of range");
  Edge deleted(path[i - 1], path[i]), added(path.front(), path[i]);
  std::reverse(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i));
  return {deleted, added};
}

struct CloseOutcome {
  enum class Status { Hamilton, Reopened, DeadEnd } status = Status::DeadEnd;
  std::vector<Vertex> cycle;
  std::optional<Mutation> record;
  Vertex escape_from = -1;
  Vertex escape_to = -1;
};

/**
   Mutable broken 2-factor: one long path plus vertex-disjoint cycles.

   When a reservoir is attached every added edge must be in Gamma; added
   edges move to the current factor and deleted edges return to Gamma.
   Without one, only structure and (optionally) host membership are checked.
 */
class BrokenFactorState {
 public:
  BrokenFactorState(Vertex n, BrokenTwoFactor b, Reservoir* gamma = nullptr, const Graph* host = nullptr)
      : n_(n), path_(std::move(b.path)), cycles_(std::move(b.cycles)), gamma_(gamma), host_(host) {
    where_.assign(static_cast<std::size_t>(n), kUnset);
    for (Vertex v : path_) place(v, kPath);
    for (std::size_t i = 0; i < cycles_.size(); ++i)
      for (Vertex v : cycles_[i]) place(v, static_cast<std::int32_t>(i));
    for (Vertex v = 0; v < n_; ++v)
      if (where_[v] == kUnset) throw std::invalid_argument("broken factor does not span");
    if (path_.empty()) throw std::invalid_argument("broken factor has an empty path");
  }

  Vertex vertex_count() const { return n_; }
  const std::vector<Vertex>& path() const { return path_; }
  const std::vector<std::vector<Vertex>>& cycles() const { return cycles_; }
  Vertex front() const { return path_.front(); }
  Vertex back() const { return path_.back(); }
  bool on_path(Vertex v) const { return where_[v] == kPath; }
  bool is_hamilton_path() const { return path_.size() == static_cast<std::size_t>(n_); }

  BrokenTwoFactor snapshot() const { return BrokenTwoFactor{cycles_, path_}; }
  std::vector<Edge> edges() const { return snapshot().edges(); }

  Mutation rotate(Vertex pivot, FixedEnd fixed) {
    if (pivot < 0 || pivot >= n_ || !on_path(pivot)) throw std::invalid_argument("rotate: pivot not on path");
    const Vertex anchor = fixed == FixedEnd::Front ? front() : back();
    const Vertex moving = fixed == FixedEnd::Front ? back() : front();
    if (pivot == anchor) throw std::invalid_argument("rotate: pivot is the fixed endpoint; close instead");
    if (pivot == moving) throw std::invalid_argument("rotate: pivot is the moving endpoint");
    const std::size_t i = index_of(pivot);
    const std::size_t nb = fixed == FixedEnd::Front ? path_.size() - 2 : 1;
    if (i == nb) throw std::invalid_argument("rotate: pivot is the moving endpoint's path neighbour (no-op)");
    require_available(pivot, moving);
    auto [deleted, added] = rotate_path(path_, i, fixed);
    take(added);
    release(deleted);
    return Mutation{0, 0, MutationKind::Rotate, pivot, deleted, added};
  }

  /// Splices the cycle through `entry` onto `endpoint`, deleting the edge
  /// from entry to its successor in the stored cycle orientation.
  Mutation absorb(Vertex endpoint, Vertex entry) {
    if (endpoint < 0 || endpoint >= n_ || entry < 0 || entry >= n_)
      throw std::invalid_argument("absorb: vertex out of range");
    if (on_path(entry)) throw std::invalid_argument("absorb: entry lies on the path");
    if (endpoint != front() && endpoint != back()) throw std::invalid_argument("absorb: not a path endpoint");
    require_available(endpoint, entry);
    if (endpoint == front() && path_.size() > 1) std::reverse(path_.begin(), path_.end());
    const auto ci = static_cast<std::size_t>(where_[entry]);
    std::vector<Vertex> cyc = std::move(cycles_[ci]);
    remove_cycle(ci);
    const std::size_t len = cyc.size();
    const std::size_t k = static_cast<std::size_t>(std::find(cyc.begin(), cyc.end(), entry) - cyc.begin());
    Edge deleted(entry, cyc[(k + 1) % len]);
    for (std::size_t s = 0; s < len; ++s) {
      Vertex v = cyc[(k + len - s) % len];
      path_.push_back(v);
      where_[v] = kPath;
    }
    Edge added(endpoint, entry);
    take(added);
    release(deleted);
    return Mutation{0, 0, MutationKind::Absorb, entry, deleted, added};
  }

  /**
     Closes the path with `closing`. A spanning path becomes the Hamilton
     cycle. Otherwise the closed cycle is reopened at a vertex y with a Gamma
     edge leaving it, deleting y's successor edge, so that the path ends at y
     ready for absorb(y, z). `reopen_at` forces y (transcript replay).
     DeadEnd leaves the state untouched.
   */
  CloseOutcome close(Edge closing, std::optional<Vertex> reopen_at = std::nullopt) {
    CloseOutcome out;
    const std::size_t len = path_.size();
    if (len < 3 || closing != Edge(front(), back()))
      throw std::invalid_argument("close: edge does not join the path endpoints");
    require_available(closing.u, closing.v);
    if (is_hamilton_path()) {
      take(closing);
      out.status = CloseOutcome::Status::Hamilton;
      out.cycle = path_;
      out.record = Mutation{0, 0, MutationKind::Close, -1, std::nullopt, closing};
      return out;
    }
    Vertex y = -1, z = -1;
    if (reopen_at) {
      y = *reopen_at;
      if (y < 0 || y >= n_ || !on_path(y)) throw std::invalid_argument("close: reopen vertex not on path");
    } else {
      if (!gamma_) throw std::logic_error("close: escape search needs a reservoir");
      std::vector<Vertex> sorted = path_;
      std::sort(sorted.begin(), sorted.end());
      for (Vertex cand : sorted) {
        gamma_->for_each_gamma_neighbor(cand, [&](Vertex w) {
          if (z < 0 && !on_path(w)) z = w;
        });
        if (z >= 0) {
          y = cand;
          break;
        }
      }
      if (y < 0) return out;
    }
    const std::size_t i = index_of(y);
    const Vertex succ = path_[(i + 1) % len];
    std::rotate(path_.begin(), path_.begin() + static_cast<std::ptrdiff_t>((i + 1) % len), path_.end());
    Edge deleted(y, succ);
    take(closing);
    release(deleted);
    out.status = CloseOutcome::Status::Reopened;
    out.record = Mutation{0, 0, MutationKind::Close, y, deleted, closing};
    out.escape_from = y;
    out.escape_to = z;
    return out;
  }

 private:
  static constexpr std::int32_t kUnset = -2;
  static constexpr std::int32_t kPath = -1;

  void place(Vertex v, std::int32_t w) {
    if (v < 0 || v >= n_) throw std::invalid_argument("vertex out of range");
    if (where_[v] != kUnset) throw std::invalid_argument("vertex used twice in broken factor");
    where_[v] = w;
  }

  std::size_t index_of(Vertex v) const {
    return static_cast<std::size_t>(std::find(path_.begin(), path_.end(), v) - path_.begin());
  }

  void remove_cycle(std::size_t ci) {
    if (ci + 1 != cycles_.size()) {
      cycles_[ci] = std::move(cycles_.back());
      for (Vertex v : cycles_[ci]) where_[v] = static_cast<std::int32_t>(ci);
    }
    cycles_.pop_back();
  }

  void require_available(Vertex a, Vertex b) const {
    if (gamma_ && !gamma_->in_gamma(a, b))
      throw std::invalid_argument("edge {" + std::to_string(a) + "," + std::to_string(b) + "} is not in the reservoir");
    if (host_ && !host_->has_edge(a, b))
      throw std::invalid_argument("edge {" + std::to_string(a) + "," + std::to_string(b) + "} is not in the host");
  }
  void take(Edge e) {
    if (gamma_) gamma_->assign(e.u, e.v, Owner::Current);
  }
  void release(Edge e) {
    if (gamma_) gamma_->assign(e.u, e.v, Owner::Gamma);
  }

  Vertex n_;
  std::vector<Vertex> path_;
  std::vector<std::vector<Vertex>> cycles_;
  std::vector<std::int32_t> where_;
  Reservoir* gamma_;
  const Graph* host_;
};

// ---------------------------------------------------------------------------
// Rotation search

struct SearchLimits {
  std::size_t max_expansions = 20000;
  std::optional<std::size_t> max_rotations;
};

enum class SearchKind : std::uint8_t { Close, Extend, Exhausted };

inline const char* search_kind_name(SearchKind k) {
  switch (k) {
    case SearchKind::Close: return "close";
    case SearchKind::Extend: return "extend";
    case SearchKind::Exhausted: return "exhausted";
  }
  return "?";
}

struct SearchOutcome {
  SearchKind kind = SearchKind::Exhausted;
  std::vector<std::pair<Vertex, FixedEnd>> rotations;  // realizing sequence
  Vertex endpoint = -1;                                 // Extend
  Vertex outside = -1;                                  // Extend
  Edge closing;                                         // Close
  std::size_t expansions = 0;
  std::size_t phase1_endpoints = 0;
  bool truncated = false;
};

struct ExpansionLevel {
  std::size_t t = 0;
  std::size_t s_size = 0;
  std::size_t boundary = 0;
  bool inequality_holds = true;  // |S_{t+1}| >= |B(S_t)|/2 - |S_t|
};

struct ExpansionReport {
  bool trivial = false;
  std::vector<ExpansionLevel> levels;
  std::size_t violations = 0;
  bool extend_available = false;
  bool saturated = false;
  std::optional<double> e0;
  double milestone = 0.0;  // eta n / 200
  std::optional<bool> milestone_met;
};

inline void to_json(nlohmann::json& j, const ExpansionReport& r) {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : r.levels)
    lv.push_back({{"t", l.t}, {"s", l.s_size}, {"boundary", l.boundary}, {"holds", l.inequality_holds}});
  j = {{"trivial", r.trivial},
       {"levels", lv},
       {"violations", r.violations},
       {"extend_available", r.extend_available},
       {"saturated", r.saturated},
       {"e0", r.e0 ? nlohmann::json(*r.e0) : nlohmann::json(nullptr)},
       {"milestone", r.milestone},
       {"milestone_met", r.milestone_met ? nlohmann::json(*r.milestone_met) : nlohmann::json(nullptr)}};
}

namespace detail {

/// Breadth-first tree of rotated paths. Gamma is read-only here: an edge in
/// Gamma is usable unless the rotated path already contains it, which for an
/// edge at the moving endpoint means the endpoint's path neighbour.
class PosaTree {
 public:
  struct Node {
    std::vector<Vertex> path;
    std::int32_t parent;
    Vertex pivot;
    FixedEnd fixed;
    std::uint32_t depth;
  };

  PosaTree(const BrokenFactorState& st, const Reservoir& gamma)
      : st_(st), gamma_(gamma), pos_(static_cast<std::size_t>(st.vertex_count()), -1),
        stamp_(static_cast<std::size_t>(st.vertex_count()), 0) {
    nodes_.push_back(Node{st.path(), -1, -1, FixedEnd::Front, 0});
  }

  std::vector<Node>& nodes() { return nodes_; }

  void new_phase() { ++cur_; }
  bool seen(Vertex v) const { return stamp_[v] == cur_; }
  void mark(Vertex v) { stamp_[v] = cur_; }

  static Vertex moving(const Node& nd, FixedEnd f) { return f == FixedEnd::Front ? nd.path.back() : nd.path.front(); }
  static Vertex anchor(const Node& nd, FixedEnd f) { return f == FixedEnd::Front ? nd.path.front() : nd.path.back(); }

  /// Extend or Close available at this node, in that order of preference.
  std::optional<SearchOutcome> examine(std::size_t idx, FixedEnd f) const {
    const Node& nd = nodes_[idx];
    const Vertex y = moving(nd, f), b = anchor(nd, f);
    Vertex off = -1;
    bool closable = false;
    gamma_.for_each_gamma_neighbor(y, [&](Vertex z) {
      if (off < 0 && !st_.on_path(z)) off = z;
      if (z == b) closable = true;
    });
    if (off >= 0) {
      SearchOutcome o;
      o.kind = SearchKind::Extend;
      o.endpoint = y;
      o.outside = off;
      o.rotations = chain(idx);
      return o;
    }
    if (closable && nd.path.size() >= 3) {
      SearchOutcome o;
      o.kind = SearchKind::Close;
      o.closing = Edge(y, b);
      o.rotations = chain(idx);
      return o;
    }
    return std::nullopt;
  }

  /// Appends unseen children; returns their indices.
  std::vector<std::size_t> expand(std::size_t idx, FixedEnd f) {
    std::vector<std::pair<Vertex, std::size_t>> pivots;
    {
      const Node& nd = nodes_[idx];
      const auto& q = nd.path;
      const std::size_t len = q.size();
      for (std::size_t i = 0; i < len; ++i) pos_[q[i]] = static_cast<std::int32_t>(i);
      const Vertex y = moving(nd, f), b = anchor(nd, f);
      const Vertex ynb = len >= 2 ? (f == FixedEnd::Front ? q[len - 2] : q[1]) : -1;
      gamma_.for_each_gamma_neighbor(y, [&](Vertex z) {
        if (!st_.on_path(z) || z == b || z == ynb) return;
        const auto i = static_cast<std::size_t>(pos_[z]);
        const Vertex next = f == FixedEnd::Front ? q[i + 1] : q[i - 1];
        if (seen(next)) return;
        mark(next);
        pivots.emplace_back(z, i);
      });
      for (Vertex v : q) pos_[v] = -1;
    }
    std::vector<std::size_t> out;
    const std::uint32_t depth = nodes_[idx].depth + 1;
    for (auto [z, i] : pivots) {
      std::vector<Vertex> child = nodes_[idx].path;
      rotate_path(child, i, f);
      nodes_.push_back(Node{std::move(child), static_cast<std::int32_t>(idx), z, f, depth});
      out.push_back(nodes_.size() - 1);
    }
    return out;
  }

  std::vector<std::pair<Vertex, FixedEnd>> chain(std::size_t idx) const {
    std::vector<std::pair<Vertex, FixedEnd>> out;
    for (auto i = static_cast<std::int32_t>(idx); nodes_[i].parent >= 0; i = nodes_[i].parent)
      out.emplace_back(nodes_[i].pivot, nodes_[i].fixed);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  const BrokenFactorState& st_;
  const Reservoir& gamma_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> pos_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t cur_ = 1;
};

}  // namespace detail

/**
   Two-sided Posa search. Phase 1 fixes the front and rotates the back
   breadth-first; phase 2 takes each phase-1 path in turn, fixes its back and
   rotates the front. Every node is checked for an off-path Gamma edge at its
   moving endpoint (Extend) and then for a Gamma edge between its endpoints
   (Close). Pivots are explored in ascending vertex order.
 */
inline SearchOutcome posa_search(const BrokenFactorState& st, const Reservoir& gamma, const SearchLimits& lim = {}) {
  detail::PosaTree tree(st, gamma);
  auto& nodes = tree.nodes();
  std::size_t expansions = 0;
  bool truncated = false;
  auto depth_ok = [&](std::size_t idx) {
    return !lim.max_rotations || nodes[idx].depth < *lim.max_rotations;
  };
  auto finish = [&](SearchOutcome o, std::size_t p1) {
    o.expansions = expansions;
    o.phase1_endpoints = p1;
    o.truncated = truncated;
    return o;
  };

  // Phase 1.
  tree.mark(st.back());
  std::vector<std::size_t> queue{0};
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::size_t idx = queue[h];
    if (auto o = tree.examine(idx, FixedEnd::Front)) return finish(std::move(*o), queue.size());
    if (!depth_ok(idx)) {
      truncated = true;
      continue;
    }
    if (expansions >= lim.max_expansions) {
      truncated = true;
      break;
    }
    ++expansions;
    for (auto c : tree.expand(idx, FixedEnd::Front)) queue.push_back(c);
  }
  const std::size_t phase1 = nodes.size();

  // Phase 2.
  for (std::size_t root = 0; root < phase1 && expansions < lim.max_expansions; ++root) {
    tree.new_phase();
    tree.mark(nodes[root].path.front());
    std::vector<std::size_t> q2{root};
    for (std::size_t h = 0; h < q2.size(); ++h) {
      const std::size_t idx = q2[h];
      if (auto o = tree.examine(idx, FixedEnd::Back)) return finish(std::move(*o), phase1);
      if (!depth_ok(idx)) {
        truncated = true;
        continue;
      }
      if (expansions >= lim.max_expansions) {
        truncated = true;
        break;
      }
      ++expansions;
      for (auto c : tree.expand(idx, FixedEnd::Back)) q2.push_back(c);
    }
    nodes.resize(phase1);
  }
  if (expansions >= lim.max_expansions) truncated = true;
  return finish(SearchOutcome{}, phase1);
}

/// Level-by-level growth of the endpoint sets S_t obtained by rotating the
/// back with the front fixed, without stopping at the first outcome.
inline ExpansionReport expansion_probe(const BrokenFactorState& st, const Reservoir& gamma,
                                       const Params* params = nullptr, std::size_t max_levels = 64,
                                       std::size_t max_expansions = 20000) {
  ExpansionReport rep;
  const Vertex n = st.vertex_count();
  if (params) {
    rep.e0 = params->e0;
    rep.milestone = params->eta * n / 200.0;
  }
  if (st.path().size() <= 2) {
    rep.trivial = true;
    return rep;
  }
  detail::PosaTree tree(st, gamma);
  tree.mark(st.back());
  std::vector<char> in_s(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> level{0};
  std::size_t s_size = 0, expansions = 0;
  auto& nodes = tree.nodes();
  for (std::size_t t = 0; t < max_levels && !level.empty(); ++t) {
    for (auto idx : level) {
      const Vertex y = detail::PosaTree::moving(nodes[idx], FixedEnd::Front);
      if (!in_s[y]) {
        in_s[y] = 1;
        ++s_size;
      }
      gamma.for_each_gamma_neighbor(y, [&](Vertex z) {
        if (!st.on_path(z)) rep.extend_available = true;
      });
    }
    // |B_Gamma(S_t)|: vertices outside S_t with a Gamma neighbour in S_t.
    std::vector<char> in_b(static_cast<std::size_t>(n), 0);
    std::size_t bsize = 0;
    for (Vertex v = 0; v < n; ++v) {
      if (!in_s[v]) continue;
      gamma.for_each_gamma_neighbor(v, [&](Vertex z) {
        if (!in_s[z] && !in_b[z]) {
          in_b[z] = 1;
          ++bsize;
        }
      });
    }
    rep.levels.push_back(ExpansionLevel{t, s_size, bsize, true});
    std::vector<std::size_t> next;
    for (auto idx : level) {
      if (expansions >= max_expansions) break;
      ++expansions;
      for (auto c : tree.expand(idx, FixedEnd::Front)) next.push_back(c);
    }
    level = std::move(next);
  }
  rep.saturated = level.empty();
  for (std::size_t t = 0; t + 1 < rep.levels.size(); ++t) {
    const double rhs = 0.5 * static_cast<double>(rep.levels[t].boundary) - static_cast<double>(rep.levels[t].s_size);
    if (static_cast<double>(rep.levels[t + 1].s_size) < rhs) {
      rep.levels[t].inequality_holds = false;
      ++rep.violations;
    }
  }
  if (rep.e0) {
    const auto t = static_cast<std::size_t>(std::floor(*rep.e0));
    const std::size_t s = rep.levels.empty() ? 0 : rep.levels[std::min(t, rep.levels.size() - 1)].s_size;
    rep.milestone_met = static_cast<double>(s) >= rep.milestone;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Conversion of all factors

enum class BudgetMode : std::uint8_t { Report, Enforce };

enum class FactorStatus : std::uint8_t { Pending, Converted, Abandoned, Lost, BudgetStopped };

inline const char* factor_status_name(FactorStatus s) {
  switch (s) {
    case FactorStatus::Pending: return "pending";
    case FactorStatus::Converted: return "converted";
    case FactorStatus::Abandoned: return "abandoned";
    case FactorStatus::Lost: return "lost";
    case FactorStatus::BudgetStopped: return "budget_stopped";
  }
  return "?";
}

struct ConversionOptions {
  BudgetMode mode = BudgetMode::Report;
  SearchLimits limits;
  bool audit = true;
  std::size_t retry_passes = 1;
};

struct FactorOutcome {
  std::size_t factor = 0;
  std::size_t initial_cycles = 0;
  FactorStatus status = FactorStatus::Pending;
  std::string reason;
  std::size_t pass = 0;
  std::size_t steps = 0;
  std::size_t rotations = 0;
  std::optional<std::size_t> cycle_index;
};

struct LedgerEntry {
  std::size_t step = 0;
  std::size_t factor = 0;
  std::string kind;  // absorb | close | close_reopen | abandon
  std::size_t rotations = 0;
  std::size_t gamma_consumed = 0;  // e(Gamma_j \ Gamma_{j+1})
  std::size_t untraced = 0;        // consumed edges not added by this step
  std::size_t g2_outside = 0;      // e(G2 \ Gamma_{j+1})
  bool within_step_cap = true;
  bool within_g2_cap = true;
};

struct BudgetLedger {
  BudgetMode mode = BudgetMode::Report;
  std::optional<double> e0;
  std::optional<double> e1;
  std::optional<double> step_cap;          // 2E0 + 2E1 + 2
  std::optional<std::size_t> rotation_limit;  // enforce: rotations < 2E0 + 2E1
  std::vector<LedgerEntry> entries;
  std::size_t violations = 0;
  std::size_t untraced_total = 0;
  std::size_t max_rotations_in_step = 0;
  std::size_t total_rotations = 0;
  bool stopped = false;

  std::optional<double> g2_cap(std::size_t j) const {
    if (!e1) return std::nullopt;
    return 4.0 * static_cast<double>(j) * *e1;
  }
};

inline void to_json(nlohmann::json& j, const BudgetLedger& l) {
  auto opt = [](const auto& o) { return o ? nlohmann::json(*o) : nlohmann::json(nullptr); };
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : l.entries)
    es.push_back({{"step", e.step},
                  {"factor", e.factor},
                  {"kind", e.kind},
                  {"rotations", e.rotations},
                  {"gamma_consumed", e.gamma_consumed},
                  {"untraced", e.untraced},
                  {"g2_outside", e.g2_outside},
                  {"within_step_cap", e.within_step_cap},
                  {"within_g2_cap", e.within_g2_cap}});
  j = {{"mode", l.mode == BudgetMode::Enforce ? "enforce" : "report"},
       {"e0", opt(l.e0)},
       {"e1", opt(l.e1)},
       {"step_cap", opt(l.step_cap)},
       {"rotation_limit", opt(l.rotation_limit)},
       {"violations", l.violations},
       {"untraced_total", l.untraced_total},
       {"max_rotations_in_step", l.max_rotations_in_step},
       {"total_rotations", l.total_rotations},
       {"stopped", l.stopped},
       {"entries", es}};
}

struct ConversionResult {
  std::vector<std::vector<Vertex>> cycles;
  std::vector<std::size_t> cycle_factor;
  std::vector<FactorOutcome> outcomes;
  BudgetLedger ledger;
  std::vector<Mutation> transcript;  // converted factors only
  std::size_t steps = 0;
  std::size_t search_close = 0;
  std::size_t search_extend = 0;
  std::size_t search_exhausted = 0;
  std::size_t dead_ends = 0;
  std::size_t conservation_checks = 0;
  std::optional<std::string> conservation_error;
};

/// Exact edge conservation: finished cycles, the current factor, the waiting
/// factors and Gamma partition E(G0).
inline std::optional<std::string> audit_conservation(const Reservoir& res,
                                                     const std::vector<std::vector<Vertex>>& finished,
                                                     const std::vector<Edge>& current,
                                                     const std::vector<const CycleCover*>& waiting) {
  const EdgeIndex& idx = res.index();
  std::vector<std::int8_t> label(idx.size(), -1);
  auto put = [&](Vertex a, Vertex b, Owner o) -> std::optional<std::string> {
    auto id = idx.id(a, b);
    if (!id) return "edge {" + std::to_string(a) + "," + std::to_string(b) + "} not in G0";
    if (label[*id] >= 0) return "edge {" + std::to_string(a) + "," + std::to_string(b) + "} held twice";
    label[*id] = static_cast<std::int8_t>(o);
    return std::nullopt;
  };
  for (const auto& c : finished)
    for (std::size_t i = 0; i < c.size(); ++i)
      if (auto e = put(c[i], c[(i + 1) % c.size()], Owner::Finished)) return e;
  for (const Edge& e : current)
    if (auto err = put(e.u, e.v, Owner::Current)) return err;
  for (const CycleCover* f : waiting)
    for (const Edge& e : f->edges())
      if (auto err = put(e.u, e.v, Owner::Future)) return err;
  for (EdgeId i = 0; i < idx.size(); ++i) {
    const auto want = label[i] < 0 ? Owner::Gamma : static_cast<Owner>(label[i]);
    if (res.owner(i) != want) {
      const Edge& e = idx.edge(i);
      return "edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "} owner mismatch";
    }
  }
  return std::nullopt;
}

/**
   Converts each 2-factor in turn into a Hamilton cycle of g0. Factors that
   hit a dead end or an exhausted search are abandoned (edges back to Gamma)
   and retried in later passes while their edges are still free.
 */
inline ConversionResult convert_all(const TwoFactorSet& tf, const Graph& g0, const Graph& g2, const Params& params,
                                    const ConversionOptions& opt = {}) {
  const Vertex n = g0.vertex_count();
  const std::size_t m = tf.factors.size();
  EdgeIndex index(g0);
  Reservoir res(index, &g2);
  for (std::size_t i = 0; i < m; ++i) {
    if (auto err = validate_cycle_cover(g0, tf.factors[i], true))
      throw std::invalid_argument("factor " + std::to_string(i) + ": " + *err);
    for (const Edge& e : tf.factors[i].edges()) {
      const EdgeId id = index.require(e.u, e.v);
      if (res.owner(id) != Owner::Gamma) throw std::invalid_argument("factors share an edge");
      res.assign(id, Owner::Future);
    }
  }

  ConversionResult out;
  BudgetLedger& ledger = out.ledger;
  ledger.mode = opt.mode;
  ledger.e0 = params.e0;
  ledger.e1 = params.e1;
  if (params.budgets_defined()) ledger.step_cap = 2.0 * *params.e0 + 2.0 * *params.e1 + 2.0;
  SearchLimits limits = opt.limits;
  const bool enforce = opt.mode == BudgetMode::Enforce && params.budgets_defined();
  if (enforce) {
    const double lim = 2.0 * *params.e0 + 2.0 * *params.e1;
    const auto r = static_cast<std::size_t>(std::max(0.0, std::ceil(lim) - 1.0));
    ledger.rotation_limit = limits.max_rotations ? std::min(*limits.max_rotations, r) : r;
    limits.max_rotations = ledger.rotation_limit;
  }

  out.outcomes.resize(m);
  std::vector<char> waiting(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    out.outcomes[i].factor = i;
    out.outcomes[i].initial_cycles = tf.factors[i].cycle_count();
  }
  std::size_t j = 0;

  auto audit = [&](const std::vector<Edge>& current) {
    if (!opt.audit || out.conservation_error) return;
    std::vector<const CycleCover*> w;
    for (std::size_t i = 0; i < m; ++i)
      if (waiting[i]) w.push_back(&tf.factors[i]);
    ++out.conservation_checks;
    if (auto err = audit_conservation(res, out.cycles, current, w))
      out.conservation_error = "step " + std::to_string(j) + ": " + *err;
  };

  // Runs one factor to completion or abandonment. Returns false when the
  // budget stops the whole conversion.
  auto run_factor = [&](std::size_t fi, std::size_t pass) -> bool {
    FactorOutcome& fo = out.outcomes[fi];
    fo.pass = pass;
    waiting[fi] = 0;
    for (const Edge& e : tf.factors[fi].edges()) res.assign(e.u, e.v, Owner::Current);
    auto [broken, removed] = break_to_path(tf.factors[fi]);
    res.assign(removed.u, removed.v, Owner::Gamma);
    std::vector<Mutation> records;
    records.push_back(Mutation{j + 1, fi, MutationKind::Break, -1, removed, std::nullopt});
    BrokenFactorState st(n, std::move(broken), &res);

    while (true) {
      const std::size_t step = j + 1;
      const std::vector<Owner> before = res.owners();
      const std::size_t first_record = records.size();
      std::string kind;
      std::size_t rotations = 0;
      bool done = false, abandon = false;

      SearchOutcome so = posa_search(st, res, limits);
      if (so.kind == SearchKind::Exhausted) {
        ++out.search_exhausted;
        abandon = true;
        fo.reason = so.truncated ? "search exhausted (limit)" : "search exhausted";
      } else {
        (so.kind == SearchKind::Close ? out.search_close : out.search_extend)++;
        for (auto [pivot, fixed] : so.rotations) records.push_back(st.rotate(pivot, fixed));
        rotations = so.rotations.size();
        if (so.kind == SearchKind::Extend) {
          records.push_back(st.absorb(so.endpoint, so.outside));
          kind = "absorb";
        } else {
          CloseOutcome co = st.close(so.closing);
          if (co.status == CloseOutcome::Status::DeadEnd) {
            ++out.dead_ends;
            abandon = true;
            fo.reason = "dead end";
          } else if (co.status == CloseOutcome::Status::Hamilton) {
            records.push_back(*co.record);
            kind = "close";
            done = true;
            for (std::size_t i = 0; i < co.cycle.size(); ++i)
              res.assign(co.cycle[i], co.cycle[(i + 1) % co.cycle.size()], Owner::Finished);
            fo.cycle_index = out.cycles.size();
            out.cycles.push_back(std::move(co.cycle));
            out.cycle_factor.push_back(fi);
          } else {
            records.push_back(*co.record);
            records.push_back(st.absorb(co.escape_from, co.escape_to));
            kind = "close_reopen";
          }
        }
      }
      for (std::size_t r = first_record; r < records.size(); ++r) {
        records[r].step = step;
        records[r].factor = fi;
      }
      if (abandon) {
        for (const Edge& e : st.edges()) res.assign(e.u, e.v, Owner::Gamma);
        kind = "abandon";
      }

      j = step;
      ++fo.steps;
      fo.rotations += rotations;
      ledger.total_rotations += rotations;
      ledger.max_rotations_in_step = std::max(ledger.max_rotations_in_step, rotations);

      LedgerEntry le;
      le.step = step;
      le.factor = fi;
      le.kind = kind;
      le.rotations = rotations;
      std::vector<Edge> added;
      for (std::size_t r = first_record; r < records.size(); ++r)
        if (records[r].added) added.push_back(*records[r].added);
      std::sort(added.begin(), added.end());
      for (EdgeId id = 0; id < before.size(); ++id) {
        if (before[id] != Owner::Gamma || res.owner(id) == Owner::Gamma) continue;
        ++le.gamma_consumed;
        if (!std::binary_search(added.begin(), added.end(), index.edge(id))) ++le.untraced;
      }
      le.g2_outside = res.g2_outside_gamma();
      if (ledger.step_cap) le.within_step_cap = static_cast<double>(le.gamma_consumed) <= *ledger.step_cap;
      if (auto cap = ledger.g2_cap(step)) le.within_g2_cap = static_cast<double>(le.g2_outside) <= *cap;
      if (!le.within_step_cap || !le.within_g2_cap) ++ledger.violations;
      ledger.untraced_total += le.untraced;
      const bool breach = !le.within_step_cap || !le.within_g2_cap;
      ledger.entries.push_back(std::move(le));

      audit(done || abandon ? std::vector<Edge>{} : st.edges());

      if (done) {
        fo.status = FactorStatus::Converted;
        fo.reason.clear();
        out.transcript.insert(out.transcript.end(), records.begin(), records.end());
      } else if (abandon) {
        fo.status = FactorStatus::Abandoned;
      }
      if (enforce && breach) {
        if (!done && !abandon) {
          for (const Edge& e : st.edges()) res.assign(e.u, e.v, Owner::Gamma);
          fo.status = FactorStatus::BudgetStopped;
          fo.reason = "budget breach";
        }
        ledger.stopped = true;
        return false;
      }
      if (done || abandon) return true;
    }
  };

  bool go = true;
  for (std::size_t i = 0; i < m && go; ++i) go = run_factor(i, 1);
  for (std::size_t pass = 2; go && pass < opt.retry_passes + 2; ++pass) {
    bool any = false;
    for (std::size_t i = 0; i < m && go; ++i) {
      if (out.outcomes[i].status != FactorStatus::Abandoned || out.outcomes[i].pass != pass - 1) continue;
      bool free = true;
      for (const Edge& e : tf.factors[i].edges())
        if (res.owner(index.require(e.u, e.v)) != Owner::Gamma) {
          free = false;
          break;
        }
      if (!free) {
        out.outcomes[i].status = FactorStatus::Lost;
        out.outcomes[i].reason = "edges consumed before retry";
        continue;
      }
      any = true;
      go = run_factor(i, pass);
    }
    if (!any) break;
  }
  for (auto& fo : out.outcomes)
    if (fo.status == FactorStatus::Pending) {
      fo.status = FactorStatus::BudgetStopped;
      fo.reason = "not attempted";
    }
  out.steps = j;
  return out;
}

/**
   Re-applies one factor's transcript to its initial 2-factor and returns the
   resulting Hamilton cycle. Throws if any record disagrees with the state.
 */
inline std::vector<Vertex> replay_factor(const CycleCover& initial, std::span<const Mutation> records, Vertex n,
                                         const Graph* host = nullptr) {
  if (records.empty() || records.front().kind != MutationKind::Break)
    throw std::invalid_argument("replay: transcript must start with a break");
  auto [broken, removed] = break_to_path(initial);
  if (records.front().deleted != removed) throw std::invalid_argument("replay: break edge mismatch");
  BrokenFactorState st(n, std::move(broken), nullptr, host);
  auto expect = [](const Mutation& got, const Mutation& want) {
    if (got.deleted != want.deleted || got.added != want.added || got.pivot != want.pivot)
      throw std::invalid_argument("replay: record mismatch at step " + std::to_string(want.step));
  };
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Mutation& m = records[r];
    if (!m.added) throw std::invalid_argument("replay: record without added edge");
    switch (m.kind) {
      case MutationKind::Rotate: {
        const Vertex mv = m.added->other(m.pivot);
        if (mv != st.front() && mv != st.back()) throw std::invalid_argument("replay: rotation not at an endpoint");
        expect(st.rotate(m.pivot, mv == st.back() ? FixedEnd::Front : FixedEnd::Back), m);
        break;
      }
      case MutationKind::Absorb: {
        const Vertex end = st.on_path(m.added->u) ? m.added->u : m.added->v;
        expect(st.absorb(end, m.added->other(end)), m);
        break;
      }
      case MutationKind::Close: {
        auto co = st.close(*m.added, m.pivot >= 0 ? std::optional<Vertex>(m.pivot) : std::nullopt);
        expect(*co.record, m);
        if (co.status == CloseOutcome::Status::Hamilton) {
          if (r + 1 != records.size()) throw std::invalid_argument("replay: records after the final close");
          return co.cycle;
        }
        break;
      }
      case MutationKind::Break: throw std::invalid_argument("replay: second break");
    }
  }
  throw std::invalid_argument("replay: transcript ends without a Hamilton cycle");
}

/// Splits a transcript by factor, in order of first appearance.
inline std::vector<std::pair<std::size_t, std::vector<Mutation>>> split_transcript(std::span<const Mutation> t) {
  std::vector<std::pair<std::size_t, std::vector<Mutation>>> out;
  for (const auto& m : t) {
    if (m.kind == MutationKind::Break) out.emplace_back(m.factor, std::vector<Mutation>{});
    if (out.empty()) throw std::invalid_argument("transcript does not start with a break");
    out.back().second.push_back(m);
  }
  return out;
}

}  // namespace hamdecomp
