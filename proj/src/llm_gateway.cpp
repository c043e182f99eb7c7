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

#include "atomgraph/llm_gateway.hpp"

#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"
#include "atomgraph/http_client.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

using nlohmann::json;

namespace {

struct BuiltinPrompt {
  const char* name;
  const char* text;
};

constexpr BuiltinPrompt kBuiltinPrompts[] = {
#include "prompt_assets.inc"
};

SchemaTag schema_for(const std::string& name) {
  if (name == templates::kNer) return SchemaTag::kEntityList;
  if (name == templates::kUnifiedExtraction) return SchemaTag::kExtraction;
  if (name == templates::kComplexity) return SchemaTag::kComplexity;
  if (name == templates::kDecomposition) return SchemaTag::kSubQuestions;
  if (name == templates::kAtomFilter) return SchemaTag::kIndexList;
  if (name == templates::kClaimVerification) return SchemaTag::kClaimCounts;
  return SchemaTag::kText;
}

constexpr const char* kRepairSuffix =
    "Your previous reply could not be parsed. Reply again with only the JSON "
    "object in the exact format requested, with no commentary and no code fences.";

std::string strip_fences(const std::string& raw) {
  std::string s = trim(raw);
  if (s.rfind("```", 0) == 0) {
    auto nl = s.find('\n');
    auto close = s.rfind("```");
    if (nl != std::string::npos && close != std::string::npos && close > nl) {
      s = trim(s.substr(nl + 1, close - nl - 1));
    }
  }
  return s;
}

[[noreturn]] void violation(const std::string& raw, const std::string& what) {
  throw ParseError("schema violation: " + what, raw);
}

const json& require_field(const json& obj, const char* key, const std::string& raw) {
  if (!obj.is_object()) violation(raw, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) violation(raw, std::string("missing field '") + key + "'");
  return *it;
}

std::vector<std::string> string_list(const json& arr, const std::string& field, const std::string& raw) {
  if (!arr.is_array()) violation(raw, "field '" + field + "' must be an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) violation(raw, "field '" + field + "[" + std::to_string(i) + "]' must be a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

std::uint64_t count_field(const json& obj, const char* key, const std::string& raw) {
  const auto& v = require_field(obj, key, raw);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    violation(raw, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

const char* schema_name(SchemaTag tag) {
  switch (tag) {
    case SchemaTag::kEntityList: return "entity_list";
    case SchemaTag::kExtraction: return "extraction";
    case SchemaTag::kComplexity: return "complexity";
    case SchemaTag::kSubQuestions: return "sub_questions";
    case SchemaTag::kIndexList: return "index_list";
    case SchemaTag::kText: return "text";
    case SchemaTag::kClaimCounts: return "claim_counts";
  }
  return "unknown";
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    auto end = text.find("}}", pos + 2);
    if (end == std::string::npos) break;
    std::string name = text.substr(pos + 2, end - pos - 2);
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    pos = end + 2;
  }
  return out;
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    auto open = text.find("{{", pos);
    if (open == std::string::npos) break;
    auto close = text.find("}}", open + 2);
    if (close == std::string::npos) break;
    const std::string key = text.substr(open + 2, close - open - 2);
    auto it = bindings.find(key);
    if (it == bindings.end()) {
      throw InvalidArgument("template '" + name + "': placeholder '" + key + "' is not bound");
    }
    out.append(text, pos, open - pos);
    out += it->second;
    pos = close + 2;
  }
  out.append(text, pos, std::string::npos);
  return out;
}

PromptRegistry PromptRegistry::builtin() {
  PromptRegistry r;
  for (const auto& p : kBuiltinPrompts) {
    r.templates_[p.name] = PromptTemplate{p.name, p.text, schema_for(p.name)};
  }
  return r;
}

void PromptRegistry::load_overrides(const std::filesystem::path& dir) {
  for (auto& [name, tmpl] : templates_) {
    const auto path = dir / (name + ".txt");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    tmpl.text = ss.str();
  }
}

const PromptTemplate& PromptRegistry::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw InvalidArgument("unknown prompt template '" + name + "'");
  return it->second;
}

std::vector<std::string> PromptRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : templates_) out.push_back(k);
  return out;
}

std::string fixture_key(const std::string& template_name, const Bindings& bindings) {
  const json j = bindings;  // std::map: keys serialize in sorted order
  return hex64(fnv1a64(template_name + '\0' + j.dump()));
}

void MockBackend::load_fixtures(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open fixture file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      add_fixture(json::parse(line));
    } catch (const json::exception& e) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void MockBackend::add_fixture(const json& entry) {
  auto text_of = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  Entry e;
  e.template_name = entry.at("template").get<std::string>();
  e.response = text_of(entry.at("response"));
  if (entry.contains("repair_response")) e.repair_response = text_of(entry["repair_response"]);
  if (entry.contains("match")) {
    e.match = entry["match"].get<Bindings>();
    partial_.push_back(std::move(e));
    return;
  }
  std::string key;
  if (entry.contains("key")) {
    key = entry["key"].get<std::string>();
  } else {
    e.match = entry.at("bindings").get<Bindings>();
    key = fixture_key(e.template_name, e.match);
  }
  exact_[e.template_name + "/" + key] = std::move(e);
}

ChatResult MockBackend::chat(const ChatRequest& request) {
  const std::string key = fixture_key(request.template_name, request.bindings);
  const Entry* hit = nullptr;
  if (auto it = exact_.find(request.template_name + "/" + key); it != exact_.end()) hit = &it->second;
  if (hit == nullptr) {
    for (const auto& e : partial_) {
      if (e.template_name != request.template_name) continue;
      bool ok = true;
      for (const auto& [k, v] : e.match) {
        auto b = request.bindings.find(k);
        ok = ok && b != request.bindings.end() && b->second == v;
      }
      if (ok) {
        hit = &e;
        break;
      }
    }
  }
  if (hit == nullptr) {
    throw FixtureMissError("no fixture for template '" + request.template_name + "' with key " + key +
                               "; bindings: " + json(request.bindings).dump(),
                           key);
  }
  ChatResult out;
  out.text = request.attempt > 0 && hit->repair_response ? *hit->repair_response : hit->response;
  for (const auto& m : request.messages) out.usage.prompt += count_tokens(m.content);
  out.usage.completion = count_tokens(out.text);
  return out;
}

RemoteChatBackend::RemoteChatBackend(RemoteChatOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw ConfigError("chat endpoint is not configured");
  if (options_.model.empty()) throw ConfigError("chat model is not configured");
}

ChatResult RemoteChatBackend::chat(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  const json body = {{"model", options_.model}, {"messages", messages}, {"temperature", options_.temperature}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  return with_retries(options_.max_attempts, options_.initial_backoff, [&] {
    const auto resp = post_json(options_.endpoint, headers, body.dump(), options_.timeout);
    raise_for_status(resp, "chat completion");
    json parsed;
    try {
      parsed = json::parse(resp.body);
    } catch (const json::exception& e) {
      throw BackendError(std::string("chat completion returned non-JSON body: ") + e.what());
    }
    ChatResult out;
    try {
      out.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw BackendError(std::string("chat completion response has no message content: ") + e.what());
    }
    if (parsed.contains("usage") && parsed["usage"].is_object()) {
      out.usage.prompt = parsed["usage"].value("prompt_tokens", 0ULL);
      out.usage.completion = parsed["usage"].value("completion_tokens", 0ULL);
    }
    return out;
  });
}

json parse_json_payload(const std::string& raw, SchemaTag schema) {
  const std::string body = strip_fences(raw);
  if (schema == SchemaTag::kText) {
    if (body.empty()) throw ParseError("empty model output", raw);
    return body;
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception&) {
    throw ParseError(std::string("model output is not valid JSON (expected ") + schema_name(schema) + ")", raw);
  }

  switch (schema) {
    case SchemaTag::kEntityList: {
      return {{"entities", string_list(require_field(j, "entities", raw), "entities", raw)}};
    }
    case SchemaTag::kExtraction: {
      json atoms = json::array();
      const auto& in_atoms = require_field(j, "atoms", raw);
      if (!in_atoms.is_array()) violation(raw, "field 'atoms' must be an array");
      for (std::size_t i = 0; i < in_atoms.size(); ++i) {
        const auto& a = in_atoms[i];
        const std::string where = "atoms[" + std::to_string(i) + "]";
        if (!a.is_object()) violation(raw, "field '" + where + "' must be an object");
        const auto& text = require_field(a, "text", raw);
        if (!text.is_string()) violation(raw, "field '" + where + ".text' must be a string");
        json out = {{"text", text}, {"entities", string_list(require_field(a, "entities", raw), where + ".entities", raw)},
                    {"span", nullptr}};
        if (a.contains("span") && !a["span"].is_null()) {
          const auto& s = a["span"];
          if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() || !s[1].is_number_unsigned() ||
              s[1].get<std::uint64_t>() < s[0].get<std::uint64_t>()) {
            violation(raw, "field '" + where + ".span' must be [start, end] with 0 <= start <= end");
          }
          out["span"] = s;
        }
        atoms.push_back(std::move(out));
      }
      json triples = json::array();
      const auto& in_triples = require_field(j, "triples", raw);
      if (!in_triples.is_array()) violation(raw, "field 'triples' must be an array");
      for (std::size_t i = 0; i < in_triples.size(); ++i) {
        const auto& t = in_triples[i];
        const std::string where = "triples[" + std::to_string(i) + "]";
        if (t.is_array()) {
          auto parts = string_list(t, where, raw);
          if (parts.size() != 3) violation(raw, "field '" + where + "' must have 3 elements");
          triples.push_back(parts);
        } else if (t.is_object()) {
          std::vector<std::string> parts;
          for (const char* k : {"head", "relation", "tail"}) {
            const auto& v = require_field(t, k, raw);
            if (!v.is_string()) violation(raw, "field '" + where + "." + k + "' must be a string");
            parts.push_back(v.get<std::string>());
          }
          triples.push_back(parts);
        } else {
          violation(raw, "field '" + where + "' must be an array or object");
        }
      }
      return {{"atoms", atoms}, {"triples", triples}};
    }
    case SchemaTag::kComplexity: {
      const json& v = j.is_number() ? j : require_field(j, "complexity", raw);
      if (!v.is_number()) violation(raw, "field 'complexity' must be a number");
      return {{"complexity", v.get<double>()}};
    }
    case SchemaTag::kSubQuestions: {
      const auto& arr = require_field(j, "sub_questions", raw);
      if (!arr.is_array()) violation(raw, "field 'sub_questions' must be an array");
      json out = json::array();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "sub_questions[" + std::to_string(i) + "]";
        if (arr[i].is_string()) {
          out.push_back({{"question", arr[i]}, {"focus", ""}});
          continue;
        }
        const auto& q = require_field(arr[i], "question", raw);
        if (!q.is_string()) violation(raw, "field '" + where + ".question' must be a string");
        std::string focus;
        if (arr[i].contains("focus") && arr[i]["focus"].is_string()) focus = arr[i]["focus"].get<std::string>();
        out.push_back({{"question", q}, {"focus", focus}});
      }
      return {{"sub_questions", out}};
    }
    case SchemaTag::kIndexList: {
      const json& arr = j.is_array() ? j : require_field(j, "keep", raw);
      if (!arr.is_array()) violation(raw, "field 'keep' must be an array");
      std::vector<std::int64_t> keep;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number_integer()) violation(raw, "field 'keep[" + std::to_string(i) + "]' must be an integer");
        keep.push_back(arr[i].get<std::int64_t>());
      }
      return {{"keep", keep}};
    }
    case SchemaTag::kClaimCounts: {
      return {{"tp", count_field(j, "tp", raw)}, {"fp", count_field(j, "fp", raw)}, {"fn", count_field(j, "fn", raw)}};
    }
    case SchemaTag::kText:
      break;
  }
  return j;
}

LlmGateway::LlmGateway(std::shared_ptr<LlmBackend> backend, PromptRegistry registry, GatewayOptions options)
    : backend_(std::move(backend)),
      registry_(std::move(registry)),
      slots_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options.max_in_flight, 1, 1024))) {
  if (!backend_) throw ConfigError("LLM backend is not configured");
}

ChatResult LlmGateway::call(const ChatRequest& request) {
  slots_.acquire();
  try {
    auto r = backend_->chat(request);
    slots_.release();
    return r;
  } catch (...) {
    slots_.release();
    throw;
  }
}

namespace {
thread_local UsageScope* active_scope = nullptr;
}  // namespace

UsageScope::UsageScope() : parent_(active_scope) { active_scope = this; }

UsageScope::~UsageScope() { active_scope = parent_; }

TokenUsage UsageScope::total() const {
  TokenUsage t;
  for (const auto& [k, u] : usage_) t += u;
  return t;
}

void LlmGateway::record(const std::string& template_name, const TokenUsage& usage) {
  for (UsageScope* s = active_scope; s != nullptr; s = s->parent_) {
    s->usage_[template_name] += usage;
    ++s->calls_;
  }
  std::lock_guard lock(usage_mu_);
  usage_[template_name] += usage;
  ++calls_;
}

LlmResponse LlmGateway::complete(const std::string& template_name, const Bindings& bindings) {
  const auto& tmpl = registry_.get(template_name);
  ChatRequest req{template_name, bindings, {{"user", tmpl.render(bindings)}}, 0};
  const auto start = std::chrono::steady_clock::now();

  LlmResponse out;
  auto first = call(req);
  record(template_name, first.usage);
  out.usage = first.usage;
  out.raw = first.text;
  try {
    out.payload = parse_json_payload(first.text, tmpl.schema);
  } catch (const ParseError& e) {
    spdlog::warn("{}: malformed model output ({}), asking once more", template_name, e.what());
    req.messages.push_back({"assistant", first.text});
    req.messages.push_back({"user", kRepairSuffix});
    req.attempt = 1;
    auto second = call(req);
    record(template_name, second.usage);
    out.usage += second.usage;
    out.raw = second.text;
    out.repaired = true;
    out.payload = parse_json_payload(second.text, tmpl.schema);
  }
  out.latency = std::chrono::steady_clock::now() - start;
  return out;
}

TokenUsage LlmGateway::total_usage() const {
  std::lock_guard lock(usage_mu_);
  TokenUsage t;
  for (const auto& [k, u] : usage_) t += u;
  return t;
}

std::map<std::string, TokenUsage> LlmGateway::usage_by_template() const {
  std::lock_guard lock(usage_mu_);
  return usage_;
}

std::uint64_t LlmGateway::call_count() const {
  std::lock_guard lock(usage_mu_);
  return calls_;
}

}  // namespace atomgraph
