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

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

namespace atomgraph {

using Bindings = std::map<std::string, std::string>;

// Output contract a template's response is validated against.
enum class SchemaTag {
  kEntityList,     // {"entities": [string]}
  kExtraction,     // {"atoms": [{text, entities, span?}], "triples": [[h, r, t]]}
  kComplexity,     // {"complexity": number}
  kSubQuestions,   // {"sub_questions": [{question, focus}]}
  kIndexList,      // {"keep": [int]}
  kText,           // free text, payload is a JSON string
  kClaimCounts,    // {"tp": int, "fp": int, "fn": int}
};

const char* schema_name(SchemaTag tag);

struct PromptTemplate {
  std::string name;
  std::string text;
  SchemaTag schema = SchemaTag::kText;

  // Placeholder names ({{name}}) in order of first appearance.
  std::vector<std::string> placeholders() const;
  // Throws InvalidArgument naming the first unbound placeholder. Extra
  // bindings are ignored.
  std::string render(const Bindings& bindings) const;
};

// Template names used by the pipeline.
namespace templates {
inline constexpr const char* kNer = "ner";
inline constexpr const char* kUnifiedExtraction = "unified_extraction";
inline constexpr const char* kComplexity = "complexity";
inline constexpr const char* kDecomposition = "decomposition";
inline constexpr const char* kAtomFilter = "atom_filter";
inline constexpr const char* kAbstractQa = "abstract_qa";
inline constexpr const char* kPreciseQa = "precise_qa";
inline constexpr const char* kClaimVerification = "claim_verification";
}  // namespace templates

class PromptRegistry {
 public:
  // The prompt texts compiled into the binary.
  static PromptRegistry builtin();

  // Replaces built-in texts with <dir>/<name>.txt where such files exist.
  void load_overrides(const std::filesystem::path& dir);

  const PromptTemplate& get(const std::string& name) const;
  bool contains(const std::string& name) const { return templates_.count(name) != 0; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

struct TokenUsage {
  std::uint64_t prompt = 0;
  std::uint64_t completion = 0;
  std::uint64_t total() const { return prompt + completion; }
  TokenUsage& operator+=(const TokenUsage& o) {
    prompt += o.prompt;
    completion += o.completion;
    return *this;
  }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string template_name;
  Bindings bindings;
  std::vector<ChatMessage> messages;
  int attempt = 0;  // 0 first ask, 1 repair
};

struct ChatResult {
  std::string text;
  TokenUsage usage;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual ChatResult chat(const ChatRequest& request) = 0;
};

// Stable key for a (template, bindings) pair.
std::string fixture_key(const std::string& template_name, const Bindings& bindings);

// Replays canned responses. Fixture files are JSON Lines; each line is one of
//   {"template": T, "bindings": {...}, "response": R}   exact match
//   {"template": T, "key": K, "response": R}            exact match by key
//   {"template": T, "match": {...}, "response": R}      all listed bindings
//                                                       equal; first wins
// R is a string or any JSON value (serialized compactly). An optional
// "repair_response" is returned for the repair attempt. Exact matches take
// precedence over "match" entries. A miss raises FixtureMissError.
class MockBackend final : public LlmBackend {
 public:
  MockBackend() = default;
  void load_fixtures(const std::filesystem::path& path);
  void add_fixture(const nlohmann::json& entry);
  std::size_t fixture_count() const { return exact_.size() + partial_.size(); }

  ChatResult chat(const ChatRequest& request) override;

 private:
  struct Entry {
    std::string template_name;
    Bindings match;
    std::string response;
    std::optional<std::string> repair_response;
  };
  std::map<std::string, Entry> exact_;
  std::vector<Entry> partial_;
};

struct RemoteChatOptions {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
};

// Chat-completion wire protocol:
//   request  {"model", "messages": [{"role", "content"}], "temperature"}
//   response {"choices": [{"message": {"content"}}],
//             "usage": {"prompt_tokens", "completion_tokens"}}
// Transient failures are retried with exponential backoff; auth and other
// 4xx errors fail immediately.
class RemoteChatBackend final : public LlmBackend {
 public:
  explicit RemoteChatBackend(RemoteChatOptions options);
  ChatResult chat(const ChatRequest& request) override;

 private:
  RemoteChatOptions options_;
};

struct LlmResponse {
  std::string raw;
  nlohmann::json payload;
  TokenUsage usage;
  std::chrono::duration<double> latency{0};
  bool repaired = false;
};

// Parses and validates model text against a schema and returns the payload in
// normalized form. Markdown code fences are stripped. Throws ParseError
// carrying the raw text; the message names the first violation.
nlohmann::json parse_json_payload(const std::string& raw, SchemaTag schema);

// Collects the token usage of every gateway call made on the current thread
// while alive. Scopes nest; each active scope sees the call.
class UsageScope {
 public:
  UsageScope();
  ~UsageScope();
  UsageScope(const UsageScope&) = delete;
  UsageScope& operator=(const UsageScope&) = delete;

  TokenUsage total() const;
  const std::map<std::string, TokenUsage>& by_template() const { return usage_; }
  std::uint64_t calls() const { return calls_; }

 private:
  friend class LlmGateway;
  UsageScope* parent_;
  std::map<std::string, TokenUsage> usage_;
  std::uint64_t calls_ = 0;
};

struct GatewayOptions {
  std::size_t max_in_flight = 4;
};

class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<LlmBackend> backend, PromptRegistry registry, GatewayOptions options = {});

  // Renders the template, calls the backend and validates the output. A
  // response that fails validation is re-asked once with a corrective
  // suffix; a second failure throws ParseError.
  LlmResponse complete(const std::string& template_name, const Bindings& bindings);

  const PromptRegistry& registry() const { return registry_; }

  TokenUsage total_usage() const;
  std::map<std::string, TokenUsage> usage_by_template() const;
  std::uint64_t call_count() const;

 private:
  ChatResult call(const ChatRequest& request);
  void record(const std::string& template_name, const TokenUsage& usage);

  std::shared_ptr<LlmBackend> backend_;
  PromptRegistry registry_;
  std::counting_semaphore<1024> slots_;

  mutable std::mutex usage_mu_;
  std::map<std::string, TokenUsage> usage_;
  std::uint64_t calls_ = 0;
};

}  // namespace atomgraph
