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
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hamdecomp/factor.hpp"
#include "hamdecomp/graph.hpp"
#include "hamdecomp/rotation.hpp"
#include "hamdecomp/sampler.hpp"
#include "hamdecomp/two_factor.hpp"

namespace hamdecomp {

inline constexpr int kResultSchema = 1;

struct RunOptions {
  BudgetMode mode = BudgetMode::Report;
  int floor_r = 2;
  std::size_t max_retries = 1;
  SearchLimits limits;
  bool audit = true;
};

struct PhaseTiming {
  std::string phase;
  double ms = 0.0;
};

struct DecompositionResult {
  Params params;
  std::string status = "ok";  // ok | phase_failure
  std::string failed_phase;
  std::string error;

  std::size_t g0_edges = 0;
  std::size_t g1_edges = 0;
  std::size_t g2_edges = 0;
  std::optional<DegreeReport> degrees;

  int r_target = 0;
  int r_achieved = 0;
  bool fast_path = false;
  std::size_t factors = 0;
  std::optional<CycleStatistics> cycle_stats;

  std::vector<std::vector<Vertex>> cycles;  // verified and pairwise edge-disjoint
  std::vector<std::string> rejected;        // reasons for cycles dropped at verification
  std::size_t achieved_cycles = 0;
  int target_m = 0;
  double edge_coverage = 0.0;

  std::vector<FactorOutcome> outcomes;
  BudgetLedger ledger;
  std::size_t steps = 0;
  std::size_t rotations = 0;
  std::size_t max_rotations_in_step = 0;
  std::size_t search_close = 0;
  std::size_t search_extend = 0;
  std::size_t search_exhausted = 0;
  std::size_t dead_ends = 0;
  std::size_t g2_consumed = 0;
  std::size_t conservation_checks = 0;
  std::optional<std::string> conservation_error;

  std::vector<PhaseTiming> timings;
  double wall_ms = 0.0;

  std::vector<Mutation> transcript;  // written separately as JSONL
};

/// Keeps exactly the cycles that are Hamilton cycles of g0 and share no edge
/// with an earlier kept cycle; recomputes the count and coverage.
inline void install_verified_cycles(DecompositionResult& r, const Graph& g0,
                                    std::vector<std::vector<Vertex>> candidates) {
  r.cycles.clear();
  r.rejected.clear();
  std::unordered_set<std::uint64_t> used;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    if (!verify_hamilton_cycle(g0, c)) {
      r.rejected.push_back("cycle " + std::to_string(i) + ": not a Hamilton cycle of G0");
      continue;
    }
    bool clash = false;
    for (std::size_t k = 0; k < c.size() && !clash; ++k)
      clash = used.count(Edge(c[k], c[(k + 1) % c.size()]).key()) > 0;
    if (clash) {
      r.rejected.push_back("cycle " + std::to_string(i) + ": shares an edge with an earlier cycle");
      continue;
    }
    for (std::size_t k = 0; k < c.size(); ++k) used.insert(Edge(c[k], c[(k + 1) % c.size()]).key());
    r.cycles.push_back(std::move(c));
  }
  r.achieved_cycles = r.cycles.size();
  const std::size_t m0 = g0.edge_count();
  r.edge_coverage = m0 ? static_cast<double>(used.size()) / static_cast<double>(m0) : 0.0;
}

/// Folds a conversion result into the decomposition record.
inline void absorb_conversion(DecompositionResult& r, const Graph& g0, ConversionResult conv) {
  r.outcomes = std::move(conv.outcomes);
  r.steps = conv.steps;
  r.rotations = conv.ledger.total_rotations;
  r.max_rotations_in_step = conv.ledger.max_rotations_in_step;
  r.search_close = conv.search_close;
  r.search_extend = conv.search_extend;
  r.search_exhausted = conv.search_exhausted;
  r.dead_ends = conv.dead_ends;
  r.g2_consumed = conv.ledger.entries.empty() ? 0 : conv.ledger.entries.back().g2_outside;
  r.conservation_checks = conv.conservation_checks;
  r.conservation_error = conv.conservation_error;
  r.ledger = std::move(conv.ledger);
  r.transcript = std::move(conv.transcript);
  install_verified_cycles(r, g0, std::move(conv.cycles));
}

/// Largest even r <= min(r1, delta(G1)) down to floor_r with an r-factor.
inline std::optional<std::pair<int, FactorExtraction>> largest_even_factor(const Graph& g1, int r1, int floor_r) {
  int r = std::min<int>(r1, static_cast<int>(g1.min_degree()));
  r -= r % 2;
  for (; r >= floor_r && r >= 2; r -= 2) {
    auto fx = extract_r_factor_detailed(g1, r);
    if (fx.factor) return std::make_pair(r, std::move(fx));
  }
  return std::nullopt;
}

/**
   sample -> split -> r-factor -> 2-factors -> Hamilton cycles -> verify.
   Phase failures are recorded in the result, never thrown. `g0_out`
   receives the sampled graph.
 */
inline DecompositionResult run_pipeline(const Params& params, const RunOptions& opt = {}, Graph* g0_out = nullptr) {
  using clock = std::chrono::steady_clock;
  if (opt.floor_r < 2 || opt.floor_r % 2) throw std::invalid_argument("floor_r must be even and >= 2");
  DecompositionResult r;
  r.params = params;
  r.target_m = params.m;
  const auto t_start = clock::now();
  auto t = t_start;
  auto lap = [&](const char* phase) {
    auto now = clock::now();
    r.timings.push_back({phase, std::chrono::duration<double, std::milli>(now - t).count()});
    t = now;
  };
  const char* phase = "sample";
  try {
    Graph g0 = sample_gnp(params.n, params.p0, substream_seed(params.seed, 0));
    r.g0_edges = g0.edge_count();
    if (g0_out) *g0_out = g0;
    lap(phase);

    phase = "split";
    SplitSample s = split(g0, params, substream_seed(params.seed, 1));
    r.g1_edges = s.g1.edge_count();
    r.g2_edges = s.g2.edge_count();
    r.degrees = degree_diagnostics(s);
    lap(phase);

    phase = "factor";
    r.r_target = params.r1;
    auto found = largest_even_factor(s.g1, params.r1, opt.floor_r);
    if (!found) throw std::runtime_error("no even r-factor of G1 with r >= " + std::to_string(opt.floor_r));
    r.r_achieved = found->first;
    r.fast_path = found->second.fast_path;
    lap(phase);

    phase = "peel";
    TwoFactorSet tf = peel_all(*found->second.factor);
    r.factors = tf.factors.size();
    r.cycle_stats = cycle_statistics(tf, params);
    lap(phase);

    phase = "convert";
    ConversionOptions co;
    co.mode = opt.mode;
    co.limits = opt.limits;
    co.audit = opt.audit;
    co.retry_passes = opt.max_retries;
    ConversionResult conv = convert_all(tf, g0, s.g2, params, co);
    lap(phase);

    phase = "verify";
    absorb_conversion(r, g0, std::move(conv));
    lap(phase);
  } catch (const std::exception& e) {
    lap(phase);
    r.status = "phase_failure";
    r.failed_phase = phase;
    r.error = e.what();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
  return r;
}

inline void to_json(nlohmann::json& j, const DecompositionResult& r) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : r.outcomes)
    outcomes.push_back({{"factor", o.factor},
                        {"initial_cycles", o.initial_cycles},
                        {"status", factor_status_name(o.status)},
                        {"reason", o.reason},
                        {"pass", o.pass},
                        {"steps", o.steps},
                        {"rotations", o.rotations},
                        {"cycle_index", o.cycle_index ? nlohmann::json(*o.cycle_index) : nlohmann::json(nullptr)}});
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& t : r.timings) timings[t.phase] = t.ms;
  j = {{"schema", kResultSchema},
       {"params", r.params},
       {"status", r.status},
       {"failed_phase", r.failed_phase},
       {"error", r.error},
       {"graph", {{"g0_edges", r.g0_edges}, {"g1_edges", r.g1_edges}, {"g2_edges", r.g2_edges}}},
       {"degree_report", r.degrees ? nlohmann::json(*r.degrees) : nlohmann::json(nullptr)},
       {"r_target", r.r_target},
       {"r_achieved", r.r_achieved},
       {"fast_path", r.fast_path},
       {"factors", r.factors},
       {"cycle_stats", r.cycle_stats ? nlohmann::json(*r.cycle_stats) : nlohmann::json(nullptr)},
       {"achieved_cycles", r.achieved_cycles},
       {"target_m", r.target_m},
       {"edge_coverage", r.edge_coverage},
       {"rejected", r.rejected},
       {"per_factor_outcomes", outcomes},
       {"rotation_stats",
        {{"steps", r.steps},
         {"rotations", r.rotations},
         {"max_rotations_in_step", r.max_rotations_in_step},
         {"search_close", r.search_close},
         {"search_extend", r.search_extend},
         {"search_exhausted", r.search_exhausted},
         {"dead_ends", r.dead_ends},
         {"g2_consumed", r.g2_consumed}}},
       {"conservation",
        {{"checks", r.conservation_checks},
         {"error", r.conservation_error ? nlohmann::json(*r.conservation_error) : nlohmann::json(nullptr)}}},
       {"ledger", r.ledger},
       {"wall_ms", timings},
       {"wall_ms_total", r.wall_ms},
       {"cycles", r.cycles}};
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepCell {
  Vertex n = 0;
  double p0 = 0.0;
  double eta = 0.0;
};

struct SweepRow {
  SweepCell cell;
  std::uint64_t seed = 0;
  int r_achieved = 0;
  std::size_t factors = 0;
  std::size_t achieved_cycles = 0;
  int target_m = 0;
  double coverage = 0.0;
  std::size_t steps = 0;
  std::size_t rotations = 0;
  std::size_t g2_consumed = 0;
  double wall_ms = 0.0;
  std::string error;
};

inline constexpr const char* kSweepHeader =
    "n,p0,eta,seed,r_achieved,factors,achieved_cycles,target_m,coverage,steps,rotations,g2_consumed,wall_ms";

inline SweepRow sweep_row(const SweepCell& cell, std::uint64_t seed, const DecompositionResult& r) {
  SweepRow row;
  row.cell = cell;
  row.seed = seed;
  row.r_achieved = r.r_achieved;
  row.factors = r.factors;
  row.achieved_cycles = r.achieved_cycles;
  row.target_m = r.target_m;
  row.coverage = r.edge_coverage;
  row.steps = r.steps;
  row.rotations = r.rotations;
  row.g2_consumed = r.g2_consumed;
  row.wall_ms = r.wall_ms;
  if (r.status != "ok") row.error = r.failed_phase + ": " + r.error;
  return row;
}

/// Runs every (cell, seed) pair on `jobs` workers. Rows come back in
/// (cell, seed) order regardless of completion order.
inline std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& grid, const std::vector<std::uint64_t>& seeds,
                                       const RunOptions& opt = {}, unsigned jobs = 1) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  for (const auto& c : grid) make_params(c.n, c.p0, c.eta, 0);
  const std::size_t total = grid.size() * seeds.size();
  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  std::mutex collect;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const SweepCell& cell = grid[i / seeds.size()];
      const std::uint64_t seed = seeds[i % seeds.size()];
      SweepRow row;
      try {
        auto res = run_pipeline(make_params(cell.n, cell.p0, cell.eta, seed), opt);
        row = sweep_row(cell, seed, res);
      } catch (const std::exception& e) {
        row.cell = cell;
        row.seed = seed;
        row.error = e.what();
      }
      std::lock_guard<std::mutex> lock(collect);
      rows[i] = std::move(row);
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

/// `with_timing` false writes 0 for wall_ms, making rows reproducible byte for byte.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool with_timing = true) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    std::ostringstream line;
    line << r.cell.n << ',' << r.cell.p0 << ',' << r.cell.eta << ',' << r.seed << ',' << r.r_achieved << ','
         << r.factors << ',' << r.achieved_cycles << ',' << r.target_m << ',' << std::fixed << std::setprecision(6)
         << r.coverage << ',' << r.steps << ',' << r.rotations << ',' << r.g2_consumed << ','
         << std::setprecision(1) << (with_timing ? r.wall_ms : 0.0);
    os << line.str() << '\n';
  }
}

}  // namespace hamdecomp
