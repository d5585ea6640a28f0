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

// hamdecomp: run, sweep, verify, oracle and diag subcommands.
//
// Exit codes: 0 success, 1 verification failure, 2 parameter error,
// 3 phase failure (partial result still written).

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hamdecomp/factor.hpp"
#include "hamdecomp/oracles.hpp"
#include "hamdecomp/pipeline.hpp"
#include "hamdecomp/sampler.hpp"
#include "hamdecomp/verify.hpp"

namespace {

using namespace hamdecomp;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kParamError = 2;
constexpr int kPhaseFailure = 3;

struct CommonFlags {
  int n = 1000;
  double p0 = 0.1;
  double eta = 0.25;
  std::uint64_t seed = 1;
  std::string mode = "report";
  int floor_r = 2;
  std::size_t max_retries = 1;
  std::size_t max_expansions = 20000;
  bool no_audit = false;
};

void add_run_flags(CLI::App* app, CommonFlags& f, bool single) {
  if (single) {
    app->add_option("--n", f.n, "number of vertices")->capture_default_str();
    app->add_option("--p0", f.p0, "edge probability")->capture_default_str();
    app->add_option("--eta", f.eta, "slack parameter in (0,1)")->capture_default_str();
    app->add_option("--seed", f.seed, "master seed")->capture_default_str();
  }
  app->add_option("--mode", f.mode, "budget mode")->check(CLI::IsMember({"report", "enforce"}))->capture_default_str();
  app->add_option("--floor-r", f.floor_r, "smallest even factor degree to try")->capture_default_str();
  app->add_option("--max-retries", f.max_retries, "retry passes for abandoned factors")->capture_default_str();
  app->add_option("--max-expansions", f.max_expansions, "rotation search node cap per step")->capture_default_str();
  app->add_flag("--no-audit", f.no_audit, "skip the per-step edge conservation audit");
}

RunOptions run_options(const CommonFlags& f) {
  RunOptions o;
  o.mode = f.mode == "enforce" ? BudgetMode::Enforce : BudgetMode::Report;
  o.floor_r = f.floor_r;
  o.max_retries = f.max_retries;
  o.limits.max_expansions = f.max_expansions;
  o.audit = !f.no_audit;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

int cmd_run(const CommonFlags& f, const std::string& out, const std::string& graph_out, const std::string& transcript) {
  Params params = make_params(f.n, f.p0, f.eta, f.seed);
  const RunOptions opt = run_options(f);
  Graph g0;
  DecompositionResult r = run_pipeline(params, opt, &g0);
  write_text(out, nlohmann::json(r).dump(1) + "\n");
  if (!graph_out.empty()) {
    std::ofstream os(graph_out);
    write_edge_list(os, g0, {"G(n,p0) n=" + std::to_string(f.n) + " p0=" + std::to_string(f.p0) +
                                 " seed=" + std::to_string(f.seed)});
  }
  if (!transcript.empty()) {
    std::ofstream os(transcript);
    write_transcript_jsonl(os, r.transcript);
  }
  std::cerr << "achieved_cycles=" << r.achieved_cycles << " target_m=" << r.target_m
            << " coverage=" << r.edge_coverage << " status=" << r.status << '\n';
  return r.status == "ok" ? kOk : kPhaseFailure;
}

int cmd_sweep(const CommonFlags& f, const std::string& ns, const std::string& p0s, const std::string& cs,
              const std::string& etas, std::size_t seeds, std::uint64_t seed_base, unsigned jobs,
              const std::string& out, bool no_timing) {
  std::vector<SweepCell> grid;
  const auto nv = parse_list(ns), ev = parse_list(etas);
  const auto pv = parse_list(p0s), cv = parse_list(cs);
  for (double n : nv)
    for (double eta : ev) {
      for (double p : pv) grid.push_back({static_cast<Vertex>(n), p, eta});
      for (double c : cv) grid.push_back({static_cast<Vertex>(n), c * std::log(n) / n, eta});
    }
  std::vector<std::uint64_t> sv;
  for (std::size_t i = 0; i < seeds; ++i) sv.push_back(seed_base + i);
  auto rows = run_sweep(grid, sv, run_options(f), jobs);
  std::ostringstream os;
  write_sweep_csv(os, rows, !no_timing);
  write_text(out, os.str());
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << "row n=" << r.cell.n << " seed=" << r.seed << ": " << r.error << '\n';
  return kOk;
}

int cmd_verify(const std::string& result_path, const std::string& graph_path) {
  std::ifstream rs(result_path), gs(graph_path);
  if (!rs || !gs) {
    std::cerr << "cannot open input files\n";
    return kParamError;
  }
  nlohmann::json result;
  verify::EdgeListGraph g;
  try {
    result = nlohmann::json::parse(rs);
    g = verify::parse_edge_list(gs);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParamError;
  }
  auto v = verify::check(result, g);
  std::cout << verify::to_json(v).dump(1) << '\n';
  return v.pass ? kOk : kVerifyFailed;
}

int cmd_oracle(const std::string& suite, const CommonFlags& f, const std::string& out) {
  nlohmann::json j = nlohmann::json::object();
  bool ok = true;
  auto add = [&](const SuiteResult& s) {
    j[s.name] = s;
    ok = ok && s.pass();
  };
  if (suite == "fracsum" || suite == "all") add(fracsum_suite());
  if (suite == "census" || suite == "all") add(census_suite());
  if (suite == "perm" || suite == "all") add(perm_suite());
  if (suite == "budget" || suite == "all") j["budget"] = budget_calculator(make_params(f.n, f.p0, f.eta, f.seed));
  j["pass"] = ok;
  write_text(out, j.dump(1) + "\n");
  return ok ? kOk : kVerifyFailed;
}

int cmd_diag(const CommonFlags& f, std::size_t trials, const std::string& out) {
  Params params = make_params(f.n, f.p0, f.eta, f.seed);
  Graph g0 = sample_gnp(params.n, params.p0, substream_seed(params.seed, 0));
  SplitSample s = split(g0, params, substream_seed(params.seed, 1));
  nlohmann::json j;
  j["params"] = params;
  j["edges"] = {{"g0", g0.edge_count()}, {"g1", s.g1.edge_count()}, {"g2", s.g2.edge_count()}};
  j["degrees"] = {{"g0_min", g0.min_degree()}, {"g0_max", g0.max_degree()},
                  {"g1_min", s.g1.min_degree()}, {"g1_max", s.g1.max_degree()},
                  {"g2_min", s.g2.min_degree()}, {"g2_max", s.g2.max_degree()}};
  j["degree_report"] = degree_diagnostics(s);
  j["deviation"] = deviation_spotcheck(g0, params.p0, trials, substream_seed(params.seed, 2));
  j["budget"] = budget_calculator(params);
  write_text(out, j.dump(1) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-disjoint Hamilton cycles in G(n,p): pipeline, audits and oracles"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values");

  CommonFlags f;
  std::string out, graph_out, transcript;

  auto* run = app.add_subcommand("run", "sample, decompose, verify and write a JSON result");
  add_run_flags(run, f, true);
  run->add_option("--out", out, "result JSON path (stdout if omitted)");
  run->add_option("--graph-out", graph_out, "write G0 as an edge list");
  run->add_option("--transcript", transcript, "write the rotation transcript as JSONL");

  std::string ns = "500", p0s, cs, etas = "0.25";
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid and write CSV");
  add_run_flags(sweep, f, false);
  sweep->add_option("--n", ns, "comma-separated vertex counts")->capture_default_str();
  sweep->add_option("--p0", p0s, "comma-separated edge probabilities");
  sweep->add_option("--c", cs, "comma-separated C values with p0 = C log n / n");
  sweep->add_option("--eta", etas, "comma-separated eta values")->capture_default_str();
  sweep->add_option("--seeds", seeds, "seeds per cell")->capture_default_str();
  sweep->add_option("--seed-base", seed_base, "first seed")->capture_default_str();
  sweep->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  sweep->add_option("--out", out, "CSV path (stdout if omitted)");
  sweep->add_flag("--no-timing", no_timing, "write 0 for wall_ms");

  std::string result_path, graph_path;
  auto* ver = app.add_subcommand("verify", "re-check a result against a graph");
  ver->add_option("--result", result_path, "result JSON")->required();
  ver->add_option("--graph", graph_path, "edge-list graph")->required();

  std::string suite = "all";
  auto* orc = app.add_subcommand("oracle", "run exact counting suites");
  orc->add_option("--suite", suite, "suite")->check(CLI::IsMember({"all", "fracsum", "census", "perm", "budget"}))
      ->capture_default_str();
  orc->add_option("--n", f.n, "n for the budget report")->capture_default_str();
  orc->add_option("--p0", f.p0, "p0 for the budget report")->capture_default_str();
  orc->add_option("--eta", f.eta, "eta for the budget report")->capture_default_str();
  orc->add_option("--out", out, "JSON path (stdout if omitted)");

  std::size_t trials = 200;
  auto* diag = app.add_subcommand("diag", "sampler degree and deviation diagnostics");
  add_run_flags(diag, f, true);
  diag->add_option("--trials", trials, "deviation spot-check trials")->capture_default_str();
  diag->add_option("--out", out, "JSON path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParamError;
  }

  try {
    if (*run) return cmd_run(f, out, graph_out, transcript);
    if (*sweep) return cmd_sweep(f, ns, p0s, cs, etas, seeds, seed_base, jobs, out, no_timing);
    if (*ver) return cmd_verify(result_path, graph_path);
    if (*orc) return cmd_oracle(suite, f, out);
    if (*diag) return cmd_diag(f, trials, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kParamError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPhaseFailure;
  }
  return kParamError;
}
