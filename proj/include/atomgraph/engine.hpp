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

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomgraph/config.hpp"
#include "atomgraph/decomposer.hpp"
#include "atomgraph/encoder.hpp"
#include "atomgraph/graph.hpp"
#include "atomgraph/ingest.hpp"
#include "atomgraph/llm_gateway.hpp"
#include "atomgraph/resonance.hpp"
#include "atomgraph/sieve.hpp"

namespace atomgraph {

// Backends built from a run configuration.
std::shared_ptr<LlmBackend> make_backend(const RunConfig& config);
std::unique_ptr<Encoder> make_encoder(const RunConfig& config);
PromptRegistry make_registry(const RunConfig& config);
BuildOptions build_options(const RunConfig& config);

struct QueryOptions {
  PlanOptions plan;
  SeedOptions seeding;
  Strategy strategy = Strategy::kPpr;
  PropagationParams propagation;
  std::size_t top_k = 25;
  std::size_t budget_tokens = 0;
  AnswerMode mode = AnswerMode::kAbstract;
  std::size_t retrieval_workers = 1;  // concurrent sub-query retrievals
  bool link_entities = false;         // entity recognition on each sub-query

  static QueryOptions from_config(const RunConfig& config);
};

struct StageStats {
  double seconds = 0.0;
  TokenUsage usage;
};

inline constexpr const char* kStageDecomposition = "decomposition";
inline constexpr const char* kStageRetrieval = "retrieval";
inline constexpr const char* kStageSieve = "sieve";
inline constexpr const char* kStageGeneration = "generation";

struct QueryInput {
  std::string id;
  std::string query;
};

// JSON Lines of {"id"?, "query"}; ids default to the 1-based line number.
std::vector<QueryInput> read_queries(const std::filesystem::path& path);

struct Retrieval {
  std::vector<Candidate> candidates;  // R(q')
  std::size_t atom_seeds = 0;
  std::size_t entity_seeds = 0;
  bool seed_fallback = false;
};

struct QueryRecord {
  std::string id;
  std::string query;
  QueryPlan plan;
  std::vector<Retrieval> retrievals;  // per effective-set entry
  EvidenceBundle evidence;
  std::string answer;
  std::map<std::string, StageStats> stages;

  // Wall-clock fields are omitted when `with_timing` is false so that two
  // runs can be compared byte for byte.
  nlohmann::json to_json(bool with_timing = true) const;
};

class QueryEngine {
 public:
  // The graph must be frozen and outlive the engine.
  QueryEngine(const AtomEntityGraph& graph, const Encoder& encoder, LlmGateway& gateway, QueryOptions options);

  // Seeding, propagation and top-k for one entry of the effective set.
  Retrieval retrieve(const std::string& sub_query, std::size_t position,
                     std::span<const std::string> linked_entities = {}) const;

  QueryRecord run(const std::string& query, const std::string& id = {}) const;

  // Output order matches input order.
  std::vector<QueryRecord> run_batch(std::span<const QueryInput> inputs, std::size_t workers) const;

  const QueryOptions& options() const { return options_; }
  const RetrievalIndex& index() const { return index_; }

 private:
  std::vector<std::string> link(const std::string& sub_query) const;

  const AtomEntityGraph& graph_;
  const Encoder& encoder_;
  LlmGateway& gateway_;
  QueryOptions options_;
  RetrievalIndex index_;
};

}  // namespace atomgraph
