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

#include "atomgraph/engine.hpp"

#include <chrono>
#include <fstream>

#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"
#include "atomgraph/parallel.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

std::shared_ptr<LlmBackend> make_backend(const RunConfig& config) {
  if (config.backend == "mock") {
    auto mock = std::make_shared<MockBackend>();
    if (!config.fixtures_path.empty()) mock->load_fixtures(config.fixtures_path);
    return mock;
  }
  if (config.backend == "remote") {
    if (config.llm_endpoint.empty()) throw ConfigError("remote backend requires llm_endpoint");
    RemoteChatOptions o;
    o.endpoint = config.llm_endpoint;
    o.model = config.llm_model;
    o.api_key = config.llm_api_key;
    return std::make_shared<RemoteChatBackend>(o);
  }
  throw ConfigError("unknown backend '" + config.backend + "'");
}

std::unique_ptr<Encoder> make_encoder(const RunConfig& config) {
  if (config.encoder == "hashing") return std::make_unique<HashingEncoder>(config.encoder_dimension);
  if (config.encoder == "remote") {
    if (config.embedding_endpoint.empty()) throw ConfigError("remote encoder requires embedding_endpoint");
    RemoteEncoderOptions o;
    o.endpoint = config.embedding_endpoint;
    o.model = config.embedding_model;
    o.api_key = config.embedding_api_key;
    return std::make_unique<RemoteEncoder>(o);
  }
  throw ConfigError("unknown encoder '" + config.encoder + "'");
}

PromptRegistry make_registry(const RunConfig& config) {
  auto registry = PromptRegistry::builtin();
  if (!config.prompts_dir.empty()) registry.load_overrides(config.prompts_dir);
  return registry;
}

BuildOptions build_options(const RunConfig& config) {
  BuildOptions b;
  b.chunking = {config.chunk_size_tokens, config.chunk_overlap_tokens};
  b.synonym = {config.synonymy_edge_topk, config.synonymy_edge_sim_threshold};
  b.workers = config.workers;
  return b;
}

QueryOptions QueryOptions::from_config(const RunConfig& c) {
  QueryOptions o;
  o.plan = {c.complexity_threshold, c.max_sub_questions};
  o.seeding.atom_weight = c.passage_node_weight;
  o.seeding.atom_top_k = c.retrieval_top_k;
  o.seeding.entity_top_k = c.entity_top_k;
  o.seeding.entity_sim_threshold = c.entity_sim_threshold;
  o.seeding.entity_node_weight = c.entity_node_weight;
  o.strategy = parse_strategy(c.propagation_method);
  o.propagation.restart = c.damping;
  o.propagation.tol = c.ppr_tolerance;
  o.propagation.max_iter = c.ppr_max_iter;
  o.propagation.num_iter = c.propagation_num_iter;
  o.propagation.num_walks = c.propagation_num_walks;
  o.propagation.walk_length = c.propagation_walk_length;
  o.propagation.seed = c.seed;
  o.top_k = c.retrieval_top_k;
  o.budget_tokens = c.budget_tokens;
  o.mode = parse_answer_mode(c.answer_mode);
  o.retrieval_workers = c.workers;
  o.link_entities = c.backend == "remote" && c.link_query_entities;
  return o;
}

std::vector<QueryInput> read_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read query file " + path.string());
  std::vector<QueryInput> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("query") || !j["query"].is_string()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected an object with a \"query\"");
    }
    QueryInput q;
    q.query = j["query"].get<std::string>();
    q.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                            : std::to_string(lineno);
    out.push_back(std::move(q));
  }
  return out;
}

nlohmann::json QueryRecord::to_json(bool with_timing) const {
  nlohmann::json stage_json = nlohmann::json::object();
  for (const auto& [name, s] : stages) {
    nlohmann::json js{{"prompt_tokens", s.usage.prompt}, {"completion_tokens", s.usage.completion}};
    if (with_timing) js["seconds"] = s.seconds;
    stage_json[name] = std::move(js);
  }
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& r : retrievals) {
    seeds.push_back({{"atoms", r.atom_seeds}, {"entities", r.entity_seeds}, {"fallback", r.seed_fallback}});
  }
  return {{"id", id},
          {"query", query},
          {"plan", plan.to_json()},
          {"seeds", seeds},
          {"evidence", evidence.to_json()},
          {"answer", answer},
          {"stages", stage_json}};
}

QueryEngine::QueryEngine(const AtomEntityGraph& graph, const Encoder& encoder, LlmGateway& gateway,
                         QueryOptions options)
    : graph_(graph), encoder_(encoder), gateway_(gateway), options_(std::move(options)), index_(graph) {
  if (encoder_.dimension() != graph_.dimension()) {
    throw InvalidArgument("encoder dimension " + std::to_string(encoder_.dimension()) +
                          " does not match graph dimension " + std::to_string(graph_.dimension()));
  }
  if (options_.top_k == 0) throw InvalidArgument("top_k must be >= 1");
}

std::vector<std::string> QueryEngine::link(const std::string& sub_query) const {
  std::vector<std::string> ids;
  const auto r = gateway_.complete(templates::kNer, {{"passage", sub_query}});
  for (const auto& name : r.payload.at("entities")) {
    if (auto id = graph_.find_entity_by_name(name.get<std::string>())) ids.push_back(*id);
  }
  return ids;
}

Retrieval QueryEngine::retrieve(const std::string& sub_query, std::size_t position,
                                std::span<const std::string> linked_entities) const {
  const auto pv = seed(encoder_.encode(sub_query), graph_, index_, options_.seeding, linked_entities);
  auto params = options_.propagation;
  params.seed = options_.propagation.seed ^ fnv1a64(sub_query);
  const auto scores = propagate(options_.strategy, graph_.topology(), pv.dense(graph_.node_count()), params);
  const auto atoms = score_atoms(scores, graph_);
  return {top_k_atoms(atoms, options_.top_k, position), pv.atom_seeds, pv.entity_seeds, pv.fallback};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

QueryRecord QueryEngine::run(const std::string& query, const std::string& id) const {
  QueryRecord rec;
  rec.id = id;
  rec.query = query;

  {
    UsageScope scope;
    const auto t = Clock::now();
    rec.plan = plan(query, gateway_, options_.plan);
    rec.stages[kStageDecomposition] = {seconds_since(t), scope.total()};
  }

  {
    UsageScope scope;
    const auto t = Clock::now();
    const auto& set = rec.plan.effective_set;
    std::vector<std::vector<std::string>> linked(set.size());
    if (options_.link_entities) {
      for (std::size_t i = 0; i < set.size(); ++i) linked[i] = link(set[i]);
    }
    rec.retrievals.resize(set.size());
    parallel_for(set.size(), options_.retrieval_workers,
                 [&](std::size_t i) { rec.retrievals[i] = retrieve(set[i], i, linked[i]); });
    for (const auto& r : rec.retrievals) rec.evidence.per_query.push_back(r.candidates);
    rec.evidence.merged = merge(rec.evidence.per_query);
    rec.stages[kStageRetrieval] = {seconds_since(t), scope.total()};
  }

  {
    UsageScope scope;
    const auto t = Clock::now();
    auto filtered = filter(query, rec.evidence.merged, graph_, gateway_);
    rec.evidence.filtered = std::move(filtered.kept);
    rec.evidence.filter_fail_open = filtered.fail_open;
    auto budget = apply_budget(aggregate(rec.evidence.filtered, graph_), options_.budget_tokens);
    rec.evidence.units = std::move(budget.units);
    rec.evidence.dropped_units = budget.dropped;
    rec.evidence.evidence_tokens = budget.tokens;
    rec.evidence.check_nesting();
    rec.stages[kStageSieve] = {seconds_since(t), scope.total()};
  }

  {
    UsageScope scope;
    const auto t = Clock::now();
    rec.answer = generate(query, rec.evidence.units, options_.mode, gateway_);
    rec.stages[kStageGeneration] = {seconds_since(t), scope.total()};
  }
  return rec;
}

std::vector<QueryRecord> QueryEngine::run_batch(std::span<const QueryInput> inputs, std::size_t workers) const {
  std::vector<QueryRecord> out(inputs.size());
  parallel_for(inputs.size(), workers, [&](std::size_t i) { out[i] = run(inputs[i].query, inputs[i].id); });
  return out;
}

}  // namespace atomgraph
