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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hamdecomp/graph.hpp"

namespace hamdecomp {

using EdgeId = std::uint32_t;

/// Stable integer ids for the edges of a fixed host graph, with CSR
/// adjacency (ascending neighbors) carrying the incident edge ids.
class EdgeIndex {
 public:
  explicit EdgeIndex(const Graph& g) : n_(g.vertex_count()), edges_(g.edges()) {
    ids_.reserve(edges_.size() * 2);
    for (EdgeId i = 0; i < edges_.size(); ++i) ids_.emplace(edges_[i].key(), i);
    offset_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (Vertex v = 0; v < n_; ++v) offset_[v + 1] = offset_[v] + g.degree(v);
    nbr_.resize(offset_.back());
    inc_.resize(offset_.back());
    for (Vertex v = 0; v < n_; ++v) {
      std::size_t k = offset_[v];
      for (Vertex w : g.neighbors(v)) {
        nbr_[k] = w;
        inc_[k] = ids_.at(Edge(v, w).key());
        ++k;
      }
    }
  }

  Vertex vertex_count() const { return n_; }
  std::size_t size() const { return edges_.size(); }
  const Edge& edge(EdgeId id) const { return edges_[id]; }

  std::optional<EdgeId> id(Vertex a, Vertex b) const {
    if (a == b || a < 0 || b < 0 || a >= n_ || b >= n_) return std::nullopt;
    auto it = ids_.find(Edge(a, b).key());
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  EdgeId require(Vertex a, Vertex b) const {
    auto i = id(a, b);
    if (!i) throw std::invalid_argument("pair is not an edge of the host graph");
    return *i;
  }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {nbr_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }
  std::span<const EdgeId> incident(Vertex v) const {
    return {inc_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }

 private:
  Vertex n_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, EdgeId> ids_;
  std::vector<std::size_t> offset_;
  std::vector<Vertex> nbr_;
  std::vector<EdgeId> inc_;
};

/// Where an edge of G0 currently lives during conversion.
enum class Owner : std::uint8_t { Gamma, Finished, Current, Future };

/**
   The reservoir Gamma: edges of G0 not held by a finished Hamilton cycle,
   the current broken factor, or a factor still waiting its turn.

   Edges of G2 are flagged so that e(G2 \ Gamma) is available in O(1).
 */
class Reservoir {
 public:
  Reservoir(const EdgeIndex& index, const Graph* g2 = nullptr)
      : index_(&index), owner_(index.size(), Owner::Gamma), in_g2_(index.size(), 0) {
    if (g2)
      for (const Edge& e : g2->edges()) {
        auto id = index.id(e.u, e.v);
        if (!id) throw std::invalid_argument("G2 edge missing from G0");
        in_g2_[*id] = 1;
      }
  }

  const EdgeIndex& index() const { return *index_; }
  Owner owner(EdgeId id) const { return owner_[id]; }
  const std::vector<Owner>& owners() const { return owner_; }

  bool in_gamma(Vertex a, Vertex b) const {
    auto id = index_->id(a, b);
    return id && owner_[*id] == Owner::Gamma;
  }

  void assign(EdgeId id, Owner o) {
    if (in_g2_[id]) {
      if (owner_[id] == Owner::Gamma && o != Owner::Gamma) ++g2_outside_;
      if (owner_[id] != Owner::Gamma && o == Owner::Gamma) --g2_outside_;
    }
    owner_[id] = o;
  }
  void assign(Vertex a, Vertex b, Owner o) { assign(index_->require(a, b), o); }

  /// Calls f(w) for each Gamma-neighbour w of v, ascending.
  template <class F>
  void for_each_gamma_neighbor(Vertex v, F&& f) const {
    auto nb = index_->neighbors(v);
    auto inc = index_->incident(v);
    for (std::size_t i = 0; i < nb.size(); ++i)
      if (owner_[inc[i]] == Owner::Gamma) f(nb[i]);
  }

  std::size_t gamma_degree(Vertex v) const {
    std::size_t d = 0;
    for_each_gamma_neighbor(v, [&](Vertex) { ++d; });
    return d;
  }

  /// e(G2 \ Gamma).
  std::size_t g2_outside_gamma() const { return g2_outside_; }
  bool is_g2(EdgeId id) const { return in_g2_[id] != 0; }

  Graph gamma_graph() const {
    std::vector<Edge> es;
    for (EdgeId i = 0; i < owner_.size(); ++i)
      if (owner_[i] == Owner::Gamma) es.push_back(index_->edge(i));
    return Graph(index_->vertex_count(), es);
  }

 private:
  const EdgeIndex* index_;
  std::vector<Owner> owner_;
  std::vector<char> in_g2_;
  std::size_t g2_outside_ = 0;
};

}  // namespace hamdecomp
