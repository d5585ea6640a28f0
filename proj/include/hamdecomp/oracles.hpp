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
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "hamdecomp/graph.hpp"
#include "hamdecomp/sampler.hpp"

namespace hamdecomp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& q) { return q.str(); }

/// Exact double -> rational (every finite double is a dyadic rational).
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  int e = 0;
  double mant = std::frexp(x, &e);
  // mant * 2^53 is an integer.
  auto im = static_cast<std::int64_t>(std::ldexp(mant, 53));
  e -= 53;
  Rational q(im);
  if (e >= 0) q *= Rational(BigInt(1) << e);
  else q /= Rational(BigInt(1) << (-e));
  return q;
}

/// Nudges a floating value upward by a relative margin and a few ulps.
inline double round_up(double x, int ops = 8) {
  double y = x + std::abs(x) * ops * std::numeric_limits<double>::epsilon();
  for (int i = 0; i < 2; ++i) y = std::nextafter(y, std::numeric_limits<double>::infinity());
  return y;
}

// ---------------------------------------------------------------------------
// Composition sums

struct CompositionSum {
  int n = 0;
  int k = 0;
  Rational value;
  double bound = 0.0;     // (k/n)(ln n)^(k-1), rounded up
  bool applicable = false;  // n >= 3k
  std::optional<bool> bound_holds;
};

/// value[t][j] = sum over ordered j-tuples (a_i >= 3, sum t) of prod 1/a_i.
inline std::vector<std::vector<Rational>> fracsum_table(int n, int k) {
  std::vector<std::vector<Rational>> v(static_cast<std::size_t>(n) + 1,
                                       std::vector<Rational>(static_cast<std::size_t>(k) + 1, Rational(0)));
  v[0][0] = 1;
  for (int j = 1; j <= k; ++j)
    for (int t = 3 * j; t <= n; ++t) {
      Rational s = 0;
      for (int a = 3; a <= t - 3 * (j - 1); ++a) s += v[t - a][j - 1] / a;
      v[t][j] = s;
    }
  return v;
}

inline CompositionSum fracsum_exact(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("fracsum_exact: n and k must be >= 1");
  CompositionSum c;
  c.n = n;
  c.k = k;
  c.value = fracsum_table(n, k)[n][k];
  c.bound = round_up(static_cast<double>(k) / n * std::pow(std::log(static_cast<double>(n)), k - 1), 4 * k + 8);
  c.applicable = n >= 3 * k;
  if (c.applicable) c.bound_holds = c.value <= exact_rational(c.bound);
  return c;
}

inline void to_json(nlohmann::json& j, const CompositionSum& c) {
  j = {{"n", c.n},
       {"k", c.k},
       {"value", to_string(c.value)},
       {"value_approx", static_cast<double>(c.value)},
       {"bound", c.bound},
       {"applicable", c.applicable},
       {"bound_holds", c.bound_holds ? nlohmann::json(*c.bound_holds) : nlohmann::json(nullptr)}};
}

// ---------------------------------------------------------------------------
// Exhaustive subgraph enumeration

inline constexpr Vertex kBruteCap = 10;

/**
   Calls f(edges) for every spanning subgraph of g in which every vertex has
   degree exactly d. Edges are decided in sorted order; a vertex whose last
   incident edge has been decided must already have degree d.
 */
inline void for_each_regular_subgraph(const Graph& g, int d, const std::function<void(const std::vector<Edge>&)>& f) {
  const Vertex n = g.vertex_count();
  const std::vector<Edge> es = g.edges();
  std::vector<std::vector<Vertex>> closing(es.size());
  {
    std::vector<std::int64_t> last(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < es.size(); ++i) last[es[i].u] = last[es[i].v] = static_cast<std::int64_t>(i);
    for (Vertex v = 0; v < n; ++v) {
      if (last[v] < 0) {
        if (d > 0) return;
        continue;
      }
      closing[static_cast<std::size_t>(last[v])].push_back(v);
    }
  }
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  std::vector<Edge> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == es.size()) {
      f(chosen);
      return;
    }
    const Edge& e = es[i];
    auto closed_ok = [&] {
      for (Vertex v : closing[i])
        if (deg[v] != d) return false;
      return true;
    };
    if (deg[e.u] < d && deg[e.v] < d) {
      ++deg[e.u];
      ++deg[e.v];
      chosen.push_back(e);
      if (closed_ok()) rec(i + 1);
      chosen.pop_back();
      --deg[e.u];
      --deg[e.v];
    }
    if (closed_ok()) rec(i + 1);
  };
  rec(0);
}

inline std::size_t count_components(Vertex n, const std::vector<Edge>& es) {
  std::vector<Vertex> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<Vertex(Vertex)> find = [&](Vertex x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::size_t comps = static_cast<std::size_t>(n);
  for (const Edge& e : es) {
    Vertex a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps;
}

struct FactorCensus {
  Vertex n = 0;
  std::uint64_t total = 0;
  std::map<std::size_t, std::uint64_t> by_cycle_count;  // k -> A'_k

  /// A_k: 2-factors with at least k cycles.
  std::uint64_t at_least(std::size_t k) const {
    std::uint64_t s = 0;
    for (auto it = by_cycle_count.lower_bound(k); it != by_cycle_count.end(); ++it) s += it->second;
    return s;
  }
};

inline FactorCensus count_2factors_brute(const Graph& g) {
  if (g.vertex_count() > kBruteCap)
    throw std::invalid_argument("count_2factors_brute: n above cap " + std::to_string(kBruteCap));
  FactorCensus c;
  c.n = g.vertex_count();
  for_each_regular_subgraph(g, 2, [&](const std::vector<Edge>& es) {
    ++c.total;
    ++c.by_cycle_count[count_components(c.n, es)];
  });
  return c;
}

inline void to_json(nlohmann::json& j, const FactorCensus& c) {
  nlohmann::json by = nlohmann::json::object();
  for (auto [k, v] : c.by_cycle_count) by[std::to_string(k)] = v;
  j = {{"n", c.n}, {"total", c.total}, {"by_cycle_count", by}};
}

// ---------------------------------------------------------------------------
// Closed-form counts in K_n

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// n! / (2^k prod a_i): 2-factors of K_n with cycles listed in order of
/// lengths a_1..a_k.
inline BigInt ordered_2factor_count(int n, const std::vector<int>& lengths) {
  if (lengths.empty()) throw std::invalid_argument("ordered_2factor_count: empty tuple");
  long sum = 0;
  for (int a : lengths) {
    if (a < 3) throw std::invalid_argument("ordered_2factor_count: cycle length below 3");
    sum += a;
  }
  if (sum != n) throw std::invalid_argument("ordered_2factor_count: lengths do not sum to n");
  BigInt den = BigInt(1) << lengths.size();
  for (int a : lengths) den *= a;
  BigInt num = factorial(n);
  if (num % den != 0) throw std::logic_error("ordered_2factor_count: non-integral count");
  return num / den;
}

/// Per cycle count k, the number of 2-factors of K_n obtained by summing
/// ordered counts over all compositions of n into k parts >= 3, divided by k!.
inline std::map<std::size_t, BigInt> complete_graph_census_from_formula(int n) {
  std::map<std::size_t, BigInt> sum;
  std::vector<int> parts;
  std::function<void(int)> rec = [&](int left) {
    if (left == 0) {
      sum[parts.size()] += ordered_2factor_count(n, parts);
      return;
    }
    for (int a = 3; a <= left; ++a) {
      if (left - a != 0 && left - a < 3) continue;
      parts.push_back(a);
      rec(left - a);
      parts.pop_back();
    }
  };
  if (n >= 3) rec(n);
  std::map<std::size_t, BigInt> out;
  for (auto& [k, v] : sum) {
    BigInt kf = factorial(static_cast<int>(k));
    if (v % kf != 0) throw std::logic_error("composition sum not divisible by k!");
    out[k] = v / kf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Permanent-based lower bound

struct PermBoundReport {
  Vertex n = 0;
  int r = 0;
  Rational bound;  // (r/2n)^n n!
  std::optional<std::uint64_t> brute_count;
  std::optional<bool> holds;
};

inline PermBoundReport perm_lower_bound_check(const Graph& h) {
  const Vertex n = h.vertex_count();
  const auto r = static_cast<int>(h.max_degree());
  if (static_cast<int>(h.min_degree()) != r) throw std::invalid_argument("perm_lower_bound_check: graph not regular");
  if (r % 2) throw std::invalid_argument("perm_lower_bound_check: degree must be even");
  PermBoundReport rep;
  rep.n = n;
  rep.r = r;
  Rational base(r, 2 * n);
  Rational b = 1;
  for (Vertex i = 0; i < n; ++i) b *= base;
  rep.bound = b * Rational(factorial(n));
  if (n <= kBruteCap) {
    rep.brute_count = count_2factors_brute(h).total;
    rep.holds = rep.bound <= Rational(BigInt(*rep.brute_count));
  }
  return rep;
}

inline void to_json(nlohmann::json& j, const PermBoundReport& p) {
  j = {{"n", p.n},
       {"r", p.r},
       {"bound", to_string(p.bound)},
       {"bound_approx", static_cast<double>(p.bound)},
       {"brute_count", p.brute_count ? nlohmann::json(*p.brute_count) : nlohmann::json(nullptr)},
       {"holds", p.holds ? nlohmann::json(*p.holds) : nlohmann::json(nullptr)}};
}

// ---------------------------------------------------------------------------
// Constant chains at concrete parameters

struct BudgetInequality {
  std::string name;
  std::optional<double> lhs;
  std::optional<double> rhs;
  std::optional<bool> holds;  // empty when a side is undefined
};

struct BudgetReport {
  Params params;
  std::vector<std::pair<std::string, std::optional<double>>> values;
  std::vector<BudgetInequality> inequalities;

  std::optional<double> value(const std::string& name) const {
    for (const auto& [k, v] : values)
      if (k == name) return v;
    return std::nullopt;
  }
};

inline BudgetReport budget_calculator(const Params& p) {
  BudgetReport rep;
  rep.params = p;
  const double n = p.n, logn = std::log(n);
  const double np0 = n * p.p0;
  const double half_m = 0.5 * (1.0 - p.eta) * np0;
  const double k0m = p.k0 * half_m;
  const double jbound = p.kappa * n * n * p.p0 / (2.0 * logn);
  const double arg1 = p.eta * p.eta * p.w0 / 1e5;
  std::optional<double> g2gamma;
  if (arg1 > 1.0) g2gamma = 2.0 * p.kappa * n * n * p.p0 / std::log(arg1);
  const double remedges = std::pow(p.eta, 6) * n * n * p.p0 / 1e17;
  std::optional<double> cap4j, step_cap, four_e1;
  if (p.e1) {
    cap4j = 4.0 * k0m * *p.e1;
    four_e1 = 4.0 * *p.e1;
  }
  if (p.budgets_defined()) step_cap = 2.0 * *p.e0 + 2.0 * *p.e1 + 2.0;
  const double available = 0.5 * ((1.0 - 0.75 * p.eta) * np0 - p.eta * np0 / 8.0);

  rep.values = {{"kappa", p.kappa},
                {"k0", p.k0},
                {"m", half_m},
                {"k0_m", k0m},
                {"jbound_rhs", jbound},
                {"e0", p.e0},
                {"e1", p.e1},
                {"step_cap", step_cap},
                {"g2_cap_at_k0m", cap4j},
                {"g2gamma_middle", g2gamma},
                {"remedges_rhs", remedges},
                {"eta_n_over_200", p.eta * n / 200.0},
                {"eta2_n_over_1e6", p.eta * p.eta * n / 1e6},
                {"factors_available", available}};

  auto ineq = [&](std::string name, std::optional<double> lhs, std::optional<double> rhs) {
    BudgetInequality b{std::move(name), lhs, rhs, std::nullopt};
    if (lhs && rhs) b.holds = *lhs <= *rhs;
    rep.inequalities.push_back(std::move(b));
  };
  ineq("k0_m <= kappa n^2 p0 / (2 log n)", k0m, jbound);
  ineq("2 kappa n^2 p0 / log(eta^2 w0/1e5) <= eta^6 n^2 p0 / 1e17", g2gamma, remedges);
  ineq("4 j E1 (j = k0 m) <= eta^6 n^2 p0 / 1e17", cap4j, remedges);
  ineq("2E0 + 2E1 + 2 <= 4E1", step_cap, four_e1);
  ineq("1 < eta w0 / 20", 1.0, p.eta * p.w0 / 20.0);
  ineq("1 < eta^2 w0 / 1e5", 1.0, arg1);
  ineq("96000 <= eta^2 w0", 96000.0, p.eta * p.eta * p.w0);
  ineq("m <= (r1 - eta n p0 / 8) / 2", half_m, available);
  ineq("1 <= eta^2 n / 1e6", 1.0, p.eta * p.eta * n / 1e6);
  return rep;
}

inline void to_json(nlohmann::json& j, const BudgetReport& r) {
  auto opt = [](const std::optional<double>& o) { return o ? nlohmann::json(*o) : nlohmann::json(nullptr); };
  nlohmann::json vals = nlohmann::json::object();
  for (const auto& [k, v] : r.values) vals[k] = opt(v);
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& b : r.inequalities)
    ins.push_back({{"name", b.name},
                   {"lhs", opt(b.lhs)},
                   {"rhs", opt(b.rhs)},
                   {"holds", b.holds ? nlohmann::json(*b.holds) : nlohmann::json(nullptr)}});
  j = {{"params", r.params}, {"values", vals}, {"inequalities", ins}};
}

// ---------------------------------------------------------------------------
// Suites over whole parameter ranges

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::vector<std::string> first_failures;

  bool pass() const { return cases > 0 && failures == 0; }
  void record(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    ++failures;
    if (first_failures.size() < 10) first_failures.push_back(what);
  }
};

inline void to_json(nlohmann::json& j, const SuiteResult& s) {
  j = {{"suite", s.name}, {"cases", s.cases}, {"failures", s.failures},
       {"pass", s.pass()}, {"first_failures", s.first_failures}};
}

/// Sum over ordered tuples by direct enumeration (small n only).
inline Rational fracsum_by_enumeration(int n, int k) {
  Rational total = 0;
  std::function<void(int, int, Rational)> rec = [&](int left, int parts, Rational acc) {
    if (parts == 0) {
      if (left == 0) total += acc;
      return;
    }
    for (int a = 3; a <= left - 3 * (parts - 1); ++a) rec(left - a, parts - 1, acc / a);
  };
  rec(n, k, Rational(1));
  return total;
}

/// Recurrence, k = 1 closed form, enumeration for n <= enum_n, and the
/// (k/n)(ln n)^(k-1) bound for every 3k <= n <= max_n.
inline SuiteResult fracsum_suite(int max_n = 60, int enum_n = 21) {
  SuiteResult s;
  s.name = "fracsum";
  const int max_k = max_n / 3;
  auto table = fracsum_table(max_n, max_k);
  for (int n = 3; n <= max_n; ++n)
    for (int k = 1; 3 * k <= n; ++k) {
      const std::string tag = "(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
      const Rational& v = table[n][k];
      if (k == 1) s.record(v == Rational(1, n), "k=1 value " + tag);
      else {
        Rational rhs = 0;
        for (int a = 3; a <= n - 3 * (k - 1); ++a) rhs += table[n - a][k - 1] / a;
        s.record(v == rhs, "recurrence " + tag);
      }
      if (n <= enum_n) s.record(v == fracsum_by_enumeration(n, k), "enumeration " + tag);
      auto c = fracsum_exact(n, k);
      s.record(c.value == v && c.bound_holds.value_or(false), "bound " + tag);
    }
  return s;
}

/// Brute 2-factor census of K_n against the composition formula, n in [3, max_n].
inline SuiteResult census_suite(int max_n = 8) {
  SuiteResult s;
  s.name = "census";
  for (int n = 3; n <= max_n; ++n) {
    auto brute = count_2factors_brute(complete_graph(n));
    auto formula = complete_graph_census_from_formula(n);
    bool same = brute.by_cycle_count.size() == formula.size();
    BigInt sum = 0;
    for (auto& [k, v] : formula) {
      sum += v;
      auto it = brute.by_cycle_count.find(k);
      same = same && it != brute.by_cycle_count.end() && BigInt(it->second) == v;
    }
    s.record(same && sum == BigInt(brute.total), "K_" + std::to_string(n));
  }
  return s;
}

/// (r/2n)^n n! <= #2-factors on every labeled even-regular graph with
/// 3 <= n <= max_n.
inline SuiteResult perm_suite(int max_n = 8) {
  SuiteResult s;
  s.name = "perm_bound";
  for (int n = 3; n <= max_n; ++n) {
    const Graph kn = complete_graph(n);
    for (int r = 2; r <= n - 1; r += 2)
      for_each_regular_subgraph(kn, r, [&](const std::vector<Edge>& es) {
        auto rep = perm_lower_bound_check(Graph(n, es));
        s.record(rep.holds.value_or(false), "n=" + std::to_string(n) + " r=" + std::to_string(r));
      });
  }
  return s;
}

}  // namespace hamdecomp
