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

#include "atomgraph/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "atomgraph/errors.hpp"
#include "atomgraph/resonance.hpp"
#include "atomgraph/sieve.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T out{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError(std::string(key) + " must be finite");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key) + " (expected true/false)");
}

struct Field {
  const char* key;
  bool secret;
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field field(const char* key, T RunConfig::*member, bool secret = false) {
  Field f{key, secret, {}, {}};
  f.set = [member](RunConfig& c, std::string_view k, std::string_view v) {
    if constexpr (std::is_same_v<T, std::string>) {
      c.*member = std::string(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*member = parse_bool(k, v);
    } else {
      c.*member = parse_number<T>(k, v);
    }
  };
  f.get = [member](const RunConfig& c) {
    if constexpr (std::is_same_v<T, std::string>) {
      return c.*member;
    } else if constexpr (std::is_same_v<T, bool>) {
      return std::string(c.*member ? "true" : "false");
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_double(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("retrieval_top_k", &RunConfig::retrieval_top_k),
      field("synonymy_edge_topk", &RunConfig::synonymy_edge_topk),
      field("synonymy_edge_sim_threshold", &RunConfig::synonymy_edge_sim_threshold),
      field("entity_node_weight", &RunConfig::entity_node_weight),
      field("entity_top_k", &RunConfig::entity_top_k),
      field("entity_sim_threshold", &RunConfig::entity_sim_threshold),
      field("propagation_method", &RunConfig::propagation_method),
      field("damping", &RunConfig::damping),
      field("passage_node_weight", &RunConfig::passage_node_weight),
      field("propagation_num_iter", &RunConfig::propagation_num_iter),
      field("propagation_num_walks", &RunConfig::propagation_num_walks),
      field("propagation_walk_length", &RunConfig::propagation_walk_length),
      field("max_sub_questions", &RunConfig::max_sub_questions),
      field("complexity_threshold", &RunConfig::complexity_threshold),
      field("ppr_tolerance", &RunConfig::ppr_tolerance),
      field("ppr_max_iter", &RunConfig::ppr_max_iter),
      field("chunk_size_tokens", &RunConfig::chunk_size_tokens),
      field("chunk_overlap_tokens", &RunConfig::chunk_overlap_tokens),
      field("backend", &RunConfig::backend),
      field("fixtures_path", &RunConfig::fixtures_path),
      field("prompts_dir", &RunConfig::prompts_dir),
      field("llm_endpoint", &RunConfig::llm_endpoint),
      field("llm_model", &RunConfig::llm_model),
      field("llm_api_key", &RunConfig::llm_api_key, true),
      field("link_query_entities", &RunConfig::link_query_entities),
      field("encoder", &RunConfig::encoder),
      field("encoder_dimension", &RunConfig::encoder_dimension),
      field("embedding_endpoint", &RunConfig::embedding_endpoint),
      field("embedding_model", &RunConfig::embedding_model),
      field("embedding_api_key", &RunConfig::embedding_api_key, true),
      field("budget_tokens", &RunConfig::budget_tokens),
      field("answer_mode", &RunConfig::answer_mode),
      field("metric_alpha", &RunConfig::metric_alpha),
      field("seed", &RunConfig::seed),
      field("workers", &RunConfig::workers),
      field("max_in_flight", &RunConfig::max_in_flight),
  };
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) { find_field(key).set(*this, key, value); }

std::string RunConfig::get(std::string_view key) const { return find_field(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
  }();
  return names;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries(bool redact_secrets) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) {
    std::string v = f.get(*this);
    if (redact_secrets && f.secret && !v.empty()) v = "***";
    out.emplace_back(f.key, std::move(v));
  }
  return out;
}

std::string RunConfig::serialize(bool redact_secrets) const {
  std::string out;
  for (const auto& [k, v] : entries(redact_secrets)) out += k + " = " + v + "\n";
  return out;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(retrieval_top_k >= 1, "retrieval_top_k must be >= 1");
  require(synonymy_edge_topk >= 1, "synonymy_edge_topk must be >= 1");
  // Synonym weights are cosines, and edge weights must be positive.
  require(synonymy_edge_sim_threshold > 0.0 && synonymy_edge_sim_threshold <= 1.0,
          "synonymy_edge_sim_threshold must be in (0, 1]");
  require(entity_node_weight >= 0.0, "entity_node_weight must be >= 0");
  require(passage_node_weight >= 0.0, "passage_node_weight must be >= 0");
  require(damping > 0.0 && damping <= 1.0, "damping must be in (0, 1]");
  require(ppr_tolerance > 0.0, "ppr_tolerance must be > 0");
  require(ppr_max_iter >= 1, "ppr_max_iter must be >= 1");
  require(propagation_num_walks >= 1, "propagation_num_walks must be >= 1");
  require(chunk_size_tokens >= 1, "chunk_size_tokens must be >= 1");
  require(chunk_overlap_tokens < chunk_size_tokens, "chunk_overlap_tokens must be smaller than chunk_size_tokens");
  require(backend == "mock" || backend == "remote", "backend must be mock or remote");
  require(encoder == "hashing" || encoder == "remote", "encoder must be hashing or remote");
  require(encoder_dimension >= 1, "encoder_dimension must be >= 1");
  require(metric_alpha >= 0.0 && metric_alpha <= 1.0, "metric_alpha must be in [0, 1]");
  require(workers >= 1, "workers must be >= 1");
  require(max_in_flight >= 1 && max_in_flight <= 1024, "max_in_flight must be in [1, 1024]");
  try {
    parse_strategy(propagation_method);
    parse_answer_mode(answer_mode);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      c.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string env_name(std::string_view key) {
  std::string out = "ATOMGRAPH_";
  for (char ch : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

void apply_environment(RunConfig& config, const std::function<const char*(const char*)>& lookup,
                       const std::vector<std::string>& present_names) {
  for (const auto& name : present_names) {
    if (name.rfind("ATOMGRAPH_", 0) != 0) continue;
    bool known = false;
    for (const auto& k : RunConfig::keys()) known = known || env_name(k) == name;
    if (!known) throw ConfigError("unknown configuration variable " + name);
  }
  for (const auto& k : RunConfig::keys()) {
    const std::string name = env_name(k);
    if (const char* v = lookup(name.c_str())) {
      try {
        config.set(k, v);
      } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
      }
    }
  }
}

RunConfig resolve_config(const std::filesystem::path& file, const std::map<std::string, std::string>& overrides,
                         const std::function<const char*(const char*)>& lookup) {
  RunConfig c = file.empty() ? RunConfig{} : RunConfig::load(file);
  apply_environment(c, lookup);
  for (const auto& [k, v] : overrides) c.set(k, v);
  c.validate();
  return c;
}

}  // namespace atomgraph
