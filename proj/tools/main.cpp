// Copyright 2026 The atomgraph Authors
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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "atomgraph/config.hpp"
#include "atomgraph/engine.hpp"
#include "atomgraph/errors.hpp"
#include "atomgraph/evaluator.hpp"
#include "atomgraph/ingest.hpp"
#include "atomgraph/snapshot.hpp"
#include "atomgraph/theory_lab.hpp"

extern char** environ;

namespace {

using namespace atomgraph;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPipeline = 2;
constexpr int kExitTheory = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::string config_path;
  std::optional<std::string> backend;
  std::optional<std::string> strategy;
  std::optional<std::size_t> top_k;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget_tokens;
  std::optional<std::string> mode;
  std::optional<std::string> fixtures;
  std::optional<std::size_t> workers;
  std::vector<std::string> sets;  // key=value
  bool verbose = false;
  bool quiet = false;
};

RunConfig resolve(const GlobalFlags& f) {
  std::map<std::string, std::string> overrides;
  if (f.backend) overrides["backend"] = *f.backend;
  if (f.strategy) overrides["propagation_method"] = *f.strategy;
  if (f.top_k) overrides["retrieval_top_k"] = std::to_string(*f.top_k);
  if (f.seed) overrides["seed"] = std::to_string(*f.seed);
  if (f.budget_tokens) overrides["budget_tokens"] = std::to_string(*f.budget_tokens);
  if (f.mode) overrides["answer_mode"] = *f.mode;
  if (f.fixtures) overrides["fixtures_path"] = *f.fixtures;
  if (f.workers) overrides["workers"] = std::to_string(*f.workers);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  std::vector<std::string> env_names;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    env_names.push_back(entry.substr(0, entry.find('=')));
  }
  RunConfig c = f.config_path.empty() ? RunConfig{} : RunConfig::load(f.config_path);
  apply_environment(c, [](const char* name) { return std::getenv(name); }, env_names);
  for (const auto& [k, v] : overrides) c.set(k, v);
  c.validate();
  return c;
}

std::unique_ptr<LlmGateway> make_gateway(const RunConfig& c) {
  GatewayOptions g;
  g.max_in_flight = c.max_in_flight;
  return std::make_unique<LlmGateway>(make_backend(c), make_registry(c), g);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

std::string usage_line(const TokenUsage& u) {
  return fmt::format("prompt={} completion={} total={}", u.prompt, u.completion, u.total());
}

std::string stats_table(const GraphStats& s) {
  std::string out;
  out += fmt::format("{:<16}{:>12}\n", "nodes", s.node_count);
  out += fmt::format("{:<16}{:>12}\n", "entities", s.entity_count);
  out += fmt::format("{:<16}{:>12}\n", "atoms", s.atom_count);
  out += fmt::format("{:<16}{:>12}\n", "edges", s.edge_count_by_kind.total());
  out += fmt::format("{:<16}{:>12}\n", "  containment", s.edge_count_by_kind.containment);
  out += fmt::format("{:<16}{:>12}\n", "  relevance", s.edge_count_by_kind.relevance);
  out += fmt::format("{:<16}{:>12}\n", "  synonym", s.edge_count_by_kind.synonym);
  out += fmt::format("{:<16}{:>12.4f}\n", "avg degree", s.avg_degree);
  out += fmt::format("{:<16}{:>12.4f}\n", "avg clustering", s.avg_clustering);
  return out;
}

int cmd_index(const RunConfig& c, const std::string& corpus_path, const std::string& out_dir,
              const std::string& report_path) {
  const auto corpus = read_corpus(corpus_path);
  auto gateway = make_gateway(c);
  const auto encoder = make_encoder(c);
  auto result = build_graph(corpus, *gateway, *encoder, build_options(c));
  save_snapshot(result.graph, out_dir);
  auto report = result.report.to_json();
  report["tokens"] = {{"prompt", gateway->total_usage().prompt}, {"completion", gateway->total_usage().completion}};
  const std::string dumped = report.dump(2) + "\n";
  if (!report_path.empty()) write_text(report_path, dumped);
  std::cout << dumped;
  spdlog::info("indexed {} documents into {} ({})", result.report.documents, out_dir,
               usage_line(gateway->total_usage()));
  return kExitOk;
}

int cmd_query(const RunConfig& c, const std::string& snapshot, const std::string& query, const std::string& query_file,
              const std::string& out_path, bool timing) {
  if (query.empty() == query_file.empty()) throw UsageError("query needs exactly one of --query or --queries");
  const auto graph = load_snapshot(snapshot);
  auto gateway = make_gateway(c);
  const auto encoder = make_encoder(c);
  const QueryEngine engine(graph, *encoder, *gateway, QueryOptions::from_config(c));
  std::vector<QueryInput> inputs = query_file.empty() ? std::vector<QueryInput>{{"1", query}} : read_queries(query_file);
  const auto records = engine.run_batch(inputs, c.workers);

  std::string out;
  std::map<std::string, StageStats> totals;
  for (const auto& r : records) {
    out += r.to_json(timing).dump() + "\n";
    for (const auto& [name, s] : r.stages) {
      totals[name].seconds += s.seconds;
      totals[name].usage += s.usage;
    }
  }
  write_text(out_path, out);
  for (const auto& [name, s] : totals) {
    spdlog::info("{:<14} {:8.3f}s  {}", name, s.seconds, usage_line(s.usage));
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& c, const std::string& results, const std::string& references, const std::string& out_path) {
  const auto items = pair_results(results, references);
  auto gateway = make_gateway(c);
  const auto encoder = make_encoder(c);
  const auto report = evaluate(items, *gateway, *encoder, c.metric_alpha, c.workers);
  if (!out_path.empty()) write_text(out_path, report.to_json().dump(2) + "\n");
  std::cout << report.summary_table();
  return kExitOk;
}

int cmd_stats(const std::string& snapshot, bool as_json) {
  const auto graph = load_snapshot(snapshot);
  const auto s = graph.compute_stats();
  if (as_json) {
    BuildReport r;
    r.stats = s;
    std::cout << r.to_json()["graph"].dump(2) << "\n";
  } else {
    std::cout << stats_table(s);
  }
  return kExitOk;
}

int cmd_theory(const RunConfig& c, std::size_t trials, const std::string& out_path) {
  theory::TheoryCheckOptions o;
  o.seed = c.seed;
  o.misrank_trials = trials;
  const auto results = theory::run_theory_checks(o);
  bool all = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) {
    std::cout << fmt::format("{:<32} {:<4} {:7.2f}s  {}\n", r.name, r.passed ? "PASS" : "FAIL", r.seconds, r.summary);
    all = all && r.passed;
    j.push_back({{"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"summary", r.summary}, {"data", r.data}});
  }
  if (!out_path.empty()) write_text(out_path, j.dump(2) + "\n");
  return all ? kExitOk : kExitTheory;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atomgraph: atom-entity graph retrieval"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--backend", g.backend, "mock or remote");
  app.add_option("--strategy", g.strategy,
                 "ppr, rwr, power_iteration, katz, label_propagation or weighted_bfs");
  app.add_option("--top-k", g.top_k, "candidate atoms per query");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--budget-tokens", g.budget_tokens, "evidence token cap (0 = none)");
  app.add_option("--mode", g.mode, "abstract or precise");
  app.add_option("--fixtures", g.fixtures, "fixture file for the mock backend");
  app.add_option("--workers", g.workers, "worker threads");
  app.add_option("--set", g.sets, "any configuration key, as key=value");
  app.add_flag("-v,--verbose", g.verbose, "debug logging");
  app.add_flag("-q,--quiet", g.quiet, "warnings and errors only");

  std::string corpus, out_dir, report_path;
  auto* index = app.add_subcommand("index", "build a graph snapshot from a corpus");
  index->add_option("--corpus", corpus, "corpus JSON Lines")->required();
  index->add_option("--out", out_dir, "snapshot directory")->required();
  index->add_option("--report", report_path, "write the build report here");

  std::string snapshot, query, query_file, results_out;
  bool no_timing = false;
  auto* qcmd = app.add_subcommand("query", "answer queries against a snapshot");
  qcmd->add_option("--snapshot", snapshot, "snapshot directory")->required();
  qcmd->add_option("--query", query, "a single query");
  qcmd->add_option("--queries", query_file, "query JSON Lines");
  qcmd->add_option("--out", results_out, "result JSON Lines (default stdout)");
  qcmd->add_flag("--no-timing", no_timing, "omit wall-clock fields from records");

  std::string results, references, eval_out;
  auto* ecmd = app.add_subcommand("eval", "score answers against references");
  ecmd->add_option("--results", results, "result JSON Lines")->required();
  ecmd->add_option("--references", references, "reference JSON Lines")->required();
  ecmd->add_option("--out", eval_out, "write the JSON report here");

  std::string stats_snapshot;
  bool stats_json = false;
  auto* scmd = app.add_subcommand("stats", "print graph statistics");
  scmd->add_option("--snapshot", stats_snapshot, "snapshot directory")->required();
  scmd->add_flag("--json", stats_json, "JSON output");

  std::size_t trials = 100000;
  std::string theory_out;
  auto* tcmd = app.add_subcommand("theory-check", "numerical checks of the retrieval model");
  tcmd->add_option("--trials", trials, "Monte-Carlo trials per misranking instance");
  tcmd->add_option("--out", theory_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto logger = spdlog::stderr_color_mt("atomgraph");
  spdlog::set_default_logger(logger);
  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  RunConfig config;
  try {
    config = resolve(g);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }

  try {
    if (*index) return cmd_index(config, corpus, out_dir, report_path);
    if (*qcmd) return cmd_query(config, snapshot, query, query_file, results_out, !no_timing);
    if (*ecmd) return cmd_eval(config, results, references, eval_out);
    if (*scmd) return cmd_stats(stats_snapshot, stats_json);
    if (*tcmd) return cmd_theory(config, trials, theory_out);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitPipeline;
  }
  return kExitUsage;
}
