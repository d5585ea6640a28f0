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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamdecomp/graph.hpp"

namespace hamdecomp {

// Random source: std::mt19937_64, whose output sequence is fixed by the C++
// standard. Doubles are built from the top 53 bits so the mapping is also
// portable. Sub-streams are keyed with splitmix64.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for the `stream`-th independent substream of `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

/**
   Run parameters and every quantity derived from them.

   E0 and E1 are only defined once their log arguments exceed 1; below that
   the budget checks downgrade to report-only.
 */
struct Params {
  Vertex n = 0;
  double p0 = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;

  double w0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  int r1 = 0;
  int m = 0;
  double kappa = 0.0;
  double k0 = 0.0;
  std::optional<double> e0;
  std::optional<double> e1;

  bool budgets_defined() const { return e0.has_value() && e1.has_value(); }
};

inline Params make_params(Vertex n, double p0, double eta, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("n must be at least 3");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("p0 must lie in [0,1]");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
  Params p;
  p.n = n;
  p.p0 = p0;
  p.eta = eta;
  p.seed = seed;
  const double logn = std::log(static_cast<double>(n));
  const double np0 = n * p0;
  p.w0 = np0 / logn;
  p.p1 = (1.0 - eta / 4.0) * p0;
  p.p2 = eta * p0 / 4.0;
  int r = static_cast<int>(std::floor((1.0 - 3.0 * eta / 4.0) * np0));
  p.r1 = r - (r % 2);
  p.m = static_cast<int>(std::floor((1.0 - eta) * np0 / 2.0));
  p.kappa = 2.0 * std::log(16.0 / eta);
  p.k0 = p.kappa * n / logn;
  const double arg0 = eta * p.w0 / 20.0;
  const double arg1 = eta * eta * p.w0 / 1e5;
  if (arg0 > 1.0) p.e0 = logn / std::log(arg0);
  if (arg1 > 1.0) p.e1 = logn / std::log(arg1);
  return p;
}

inline void to_json(nlohmann::json& j, const Params& p) {
  auto opt = [](const std::optional<double>& x) -> nlohmann::json {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  };
  j = {{"n", p.n},         {"p0", p.p0}, {"eta", p.eta},   {"seed", p.seed},
       {"w0", p.w0},       {"p1", p.p1}, {"p2", p.p2},     {"r1", p.r1},
       {"m", p.m},         {"kappa", p.kappa},             {"k0", p.k0},
       {"E0", opt(p.e0)},  {"E1", opt(p.e1)},
       {"asymptotic_regime_reached", p.budgets_defined()}};
}

/// Edge list of G(n, p) via geometric skipping over the pair sequence,
/// ordered by larger endpoint then smaller endpoint.
inline std::vector<Edge> sample_gnp_edges(Vertex n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  std::vector<Edge> out;
  if (p == 0.0) return out;
  const double expected = 0.5 * n * (n - 1.0) * p;
  out.reserve(static_cast<std::size_t>(expected + 4.0 * std::sqrt(expected + 1.0)));
  if (p == 1.0) {
    for (Vertex v = 1; v < n; ++v)
      for (Vertex w = 0; w < v; ++w) out.emplace_back(w, v);
    return out;
  }
  Rng rng(seed);
  const double log_q = std::log1p(-p);
  long long v = 1, w = -1;
  while (v < n) {
    const double skip = std::floor(std::log1p(-uniform01(rng)) / log_q);
    w += 1 + static_cast<long long>(std::min(skip, 1e15));
    while (w >= v && v < n) {
      w -= v;
      ++v;
    }
    if (v < n) out.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
  }
  return out;
}

inline Graph sample_gnp(Vertex n, double p, std::uint64_t seed) {
  auto es = sample_gnp_edges(n, p, seed);
  return Graph(n, es);
}

struct SplitSample {
  Graph g0;
  Graph g1;
  Graph g2;
  Params params;
};

/// Sends each edge of g0, in lexicographic order, to g1 with probability
/// `keep` and to g2 otherwise.
inline SplitSample split_with_probability(const Graph& g0, double keep, const Params& params,
                                          std::uint64_t seed) {
  if (!(keep >= 0.0 && keep <= 1.0)) throw std::invalid_argument("keep must lie in [0,1]");
  Rng rng(seed);
  std::vector<Edge> e1, e2;
  for (const Edge& e : g0.edges()) (uniform01(rng) < keep ? e1 : e2).push_back(e);
  const Vertex n = g0.vertex_count();
  return SplitSample{g0, Graph(n, e1), Graph(n, e2), params};
}

inline SplitSample split(const Graph& g0, const Params& params, std::uint64_t seed) {
  return split_with_probability(g0, 1.0 - params.eta / 4.0, params, seed);
}

struct DegreeCheck {
  std::string name;
  std::string relation;  // ">=" or "<="
  double observed = 0.0;
  double threshold = 0.0;
  bool holds = false;
  Vertex witness = -1;  // extreme vertex realising `observed`
};

struct DegreeReport {
  std::vector<DegreeCheck> checks;
  bool all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const DegreeCheck& c) { return c.holds; });
  }
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.holds) out.push_back(c.name);
    return out;
  }
};

inline DegreeReport degree_diagnostics(const SplitSample& s) {
  const auto& p = s.params;
  const double np0 = s.params.n * p.p0;
  auto extreme = [](const Graph& g, bool want_min) {
    Vertex best = g.vertex_count() > 0 ? 0 : -1;
    for (Vertex v = 1; v < g.vertex_count(); ++v) {
      auto d = g.degree(v), bd = g.degree(best);
      if (want_min ? d < bd : d > bd) best = v;
    }
    return best;
  };
  DegreeReport rep;
  auto add = [&](std::string name, const Graph& g, bool is_min, double threshold) {
    DegreeCheck c;
    c.name = std::move(name);
    c.relation = is_min ? ">=" : "<=";
    c.witness = extreme(g, is_min);
    c.observed = c.witness >= 0 ? static_cast<double>(g.degree(c.witness)) : 0.0;
    c.threshold = threshold;
    c.holds = is_min ? c.observed >= threshold : c.observed <= threshold;
    rep.checks.push_back(c);
  };
  add("min_degree_g1", s.g1, true, (1.0 - p.eta / 2.0) * np0);
  add("max_degree_g1", s.g1, false, np0);
  add("min_degree_g2", s.g2, true, p.eta * np0 / 5.0);
  return rep;
}

inline void to_json(nlohmann::json& j, const DegreeReport& r) {
  j = nlohmann::json::array();
  for (const auto& c : r.checks)
    j.push_back({{"check", c.name},
                 {"relation", c.relation},
                 {"observed", c.observed},
                 {"threshold", c.threshold},
                 {"holds", c.holds},
                 {"witness", c.witness}});
}

/// Large-deviation inequalities for edge counts between vertex sets.
enum class Deviation { ABedgesSmall, ABedgesLarge, AedgesSmall, AedgesLarge, ABlinear };

inline const char* deviation_name(Deviation d) {
  switch (d) {
    case Deviation::ABedgesSmall: return "ABedges(i)";
    case Deviation::ABedgesLarge: return "ABedges(ii)";
    case Deviation::AedgesSmall: return "Aedges(i)";
    case Deviation::AedgesLarge: return "Aedges(ii)";
    case Deviation::ABlinear: return "ABlinear";
  }
  return "?";
}

struct DeviationOutcome {
  Deviation which;
  bool holds;
  double observed;
  double lower;  // -inf when one-sided
  double upper;
};

/// Evaluates every inequality whose regime condition is met by (a, b).
/// Empty sets make all of them vacuous, so nothing is returned.
inline std::vector<DeviationOutcome> evaluate_deviation(Vertex n, double p, std::size_t a,
                                                        std::size_t b, std::size_t e_ab,
                                                        std::size_t e_a) {
  std::vector<DeviationOutcome> out;
  if (a == 0 || p <= 0.0) return out;
  const double logn = std::log(static_cast<double>(n));
  const double inf = std::numeric_limits<double>::infinity();
  const double da = static_cast<double>(a), db = static_cast<double>(b);
  auto push = [&](Deviation w, double obs, double lo, double hi) {
    out.push_back({w, obs >= lo && obs <= hi, obs, lo, hi});
  };
  const double ea = static_cast<double>(e_a);
  if (logn / (da * p) >= 7.0 / 4.0)
    push(Deviation::AedgesSmall, ea, -inf, 2.0 * da * logn);
  else
    push(Deviation::AedgesLarge, ea, -inf, 3.5 * da * da * p);
  if (b == 0) return out;
  const double eab = static_cast<double>(e_ab);
  if ((1.0 / da + 1.0 / db) * logn / p >= 3.5)
    push(Deviation::ABedgesSmall, eab, -inf, 2.0 * (da + db) * logn);
  else
    push(Deviation::ABedgesLarge, eab, -inf, 7.0 * da * db * p);
  const double mean = da * db * p;
  if (mean / n >= 700.0) push(Deviation::ABlinear, eab, 13.0 / 14.0 * mean, 15.0 / 14.0 * mean);
  return out;
}

struct DeviationTally {
  std::size_t evaluated = 0;
  std::size_t passed = 0;
};

struct DeviationReport {
  std::size_t trials = 0;
  std::size_t skipped_ablinear = 0;  // pairs outside the linear-size regime
  std::vector<std::pair<Deviation, DeviationTally>> tallies;

  DeviationTally tally(Deviation d) const {
    for (const auto& [k, t] : tallies)
      if (k == d) return t;
    return {};
  }
  std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& [k, t] : tallies) v += t.evaluated - t.passed;
    return v;
  }
};

/// Samples `trials` random disjoint pairs (A, B) with log-uniform sizes and
/// evaluates the applicable inequalities on each. A statistical spot check.
inline DeviationReport deviation_spotcheck(const Graph& g, double p, std::size_t trials,
                                           std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const Vertex n = g.vertex_count();
  DeviationReport rep;
  rep.trials = trials;
  for (Deviation d : {Deviation::ABedgesSmall, Deviation::ABedgesLarge, Deviation::AedgesSmall,
                      Deviation::AedgesLarge, Deviation::ABlinear})
    rep.tallies.push_back({d, {}});
  if (n < 2) return rep;
  Rng rng(seed);
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  auto log_uniform = [&](std::size_t hi) {
    double x = std::exp(uniform01(rng) * std::log(static_cast<double>(hi) + 1.0));
    return std::clamp<std::size_t>(static_cast<std::size_t>(x), 1, hi);
  };
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t a = log_uniform(static_cast<std::size_t>(n) / 2);
    std::size_t b = log_uniform(static_cast<std::size_t>(n) - a);
    for (std::size_t i = 0; i < a + b; ++i)
      std::swap(perm[i], perm[i + uniform_below(rng, static_cast<std::size_t>(n) - i)]);
    std::span<const Vertex> sa(perm.data(), a), sb(perm.data() + a, b);
    auto outcomes = evaluate_deviation(n, p, a, b, edge_count_between(g, sa, sb),
                                       edge_count_between(g, sa, sa));
    bool saw_linear = false;
    for (const auto& o : outcomes) {
      for (auto& [k, tal] : rep.tallies)
        if (k == o.which) {
          ++tal.evaluated;
          tal.passed += o.holds ? 1 : 0;
        }
      saw_linear |= o.which == Deviation::ABlinear;
    }
    if (!saw_linear) ++rep.skipped_ablinear;
  }
  return rep;
}

inline void to_json(nlohmann::json& j, const DeviationReport& r) {
  j = {{"trials", r.trials}, {"skipped_ablinear", r.skipped_ablinear}, {"violations", r.violations()}};
  for (const auto& [k, t] : r.tallies)
    j["inequalities"][deviation_name(k)] = {{"evaluated", t.evaluated}, {"passed", t.passed}};
}

}  // namespace hamdecomp
