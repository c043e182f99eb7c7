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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace atomgraph {

struct RunConfig {
  // Retrieval and graph hyperparameters.
  std::size_t retrieval_top_k = 25;
  std::size_t synonymy_edge_topk = 2047;
  double synonymy_edge_sim_threshold = 0.8;
  double entity_node_weight = 1.0;
  std::size_t entity_top_k = 20;
  double entity_sim_threshold = 0.3;
  std::string propagation_method = "ppr";
  double damping = 0.3;
  double passage_node_weight = 0.1;
  std::size_t propagation_num_iter = 20;
  std::size_t propagation_num_walks = 1000;
  std::size_t propagation_walk_length = 10;
  std::size_t max_sub_questions = 3;
  double complexity_threshold = 6.5;
  double ppr_tolerance = 1e-8;
  std::size_t ppr_max_iter = 1000;

  // Ingestion.
  std::size_t chunk_size_tokens = 256;
  std::size_t chunk_overlap_tokens = 32;

  // Backends.
  std::string backend = "mock";  // mock | remote
  std::string fixtures_path;
  std::string prompts_dir;
  std::string llm_endpoint;
  std::string llm_model;
  std::string llm_api_key;
  bool link_query_entities = false;  // remote mode: run entity recognition on queries
  std::string encoder = "hashing";   // hashing | remote
  std::size_t encoder_dimension = 64;
  std::string embedding_endpoint;
  std::string embedding_model;
  std::string embedding_api_key;

  // Generation and evaluation.
  std::size_t budget_tokens = 0;  // 0 = no cap
  std::string answer_mode = "abstract";
  double metric_alpha = 0.7;

  // Execution.
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t max_in_flight = 4;

  // Assigns one key from its text form. Throws ConfigError on unknown keys
  // and unparseable or out-of-range values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  // Ordered key/value view. Secrets are replaced by "***" when redacted.
  std::vector<std::pair<std::string, std::string>> entries(bool redact_secrets = false) const;
  std::string serialize(bool redact_secrets = false) const;

  // Cross-field checks (overlap < chunk size, known strategy, ...).
  void validate() const;

  static const std::vector<std::string>& keys();
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// "ATOMGRAPH_" + upper-cased key.
std::string env_name(std::string_view key);

// Applies every ATOMGRAPH_<KEY> variable that `lookup` resolves. Variables
// with the prefix but no matching key are rejected.
void apply_environment(RunConfig& config, const std::function<const char*(const char*)>& lookup,
                       const std::vector<std::string>& present_names = {});

// Default, file (when given), environment, then explicit overrides.
RunConfig resolve_config(const std::filesystem::path& file, const std::map<std::string, std::string>& overrides,
                         const std::function<const char*(const char*)>& lookup);

}  // namespace atomgraph
