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

#include "atomgraph/encoder.hpp"

#include <json.hpp>

#include "atomgraph/errors.hpp"
#include "atomgraph/http_client.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

std::vector<Embedding> Encoder::encode_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(encode(t));
  return out;
}

HashingEncoder::HashingEncoder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension == 0) throw InvalidArgument("encoder dimension must be positive");
}

Embedding HashingEncoder::encode(std::string_view text) const {
  const std::string norm = normalize_name(text);
  if (norm.empty()) throw InvalidArgument("cannot encode empty text");
  const std::string padded = " " + norm + " ";
  std::vector<double> v(dimension_, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, 3), seed_);
    const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
    v[(h & 0x7fffffffffffffffULL) % dimension_] += sign;
  }
  bool all_zero = true;
  for (double x : v) all_zero = all_zero && x == 0.0;
  if (all_zero) {
    // Every trigram cancelled out; fall back to a whole-string bucket.
    v[fnv1a64(norm, seed_) % dimension_] = 1.0;
  }
  return Embedding::normalized(std::move(v));
}

RemoteEncoder::RemoteEncoder(RemoteEncoderOptions options)
    : options_(std::move(options)), dimension_(options_.dimension) {
  if (options_.endpoint.empty()) throw ConfigError("remote encoder endpoint is not configured");
  if (options_.batch_size == 0) throw ConfigError("encoder batch size must be positive");
}

std::size_t RemoteEncoder::dimension() const {
  if (dimension_.load() == 0) {
    // Probe once so callers can size indexes before the first real batch.
    encode("dimension probe");
  }
  return dimension_.load();
}

Embedding RemoteEncoder::encode(std::string_view text) const {
  std::string s(text);
  return encode_batch(std::span<const std::string>(&s, 1)).front();
}

std::vector<Embedding> RemoteEncoder::encode_batch(std::span<const std::string> texts) const {
  for (const auto& t : texts) {
    if (trim(t).empty()) throw InvalidArgument("cannot encode empty text");
  }
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += options_.batch_size) {
    auto chunk = texts.subspan(i, std::min(options_.batch_size, texts.size() - i));
    auto part = with_retries(options_.max_attempts, options_.initial_backoff,
                             [&] { return request(chunk); });
    for (auto& e : part) out.push_back(std::move(e));
  }
  return out;
}

std::vector<Embedding> RemoteEncoder::request(std::span<const std::string> texts) const {
  nlohmann::json body = {{"input", std::vector<std::string>(texts.begin(), texts.end())}};
  if (!options_.model.empty()) body["model"] = options_.model;
  std::vector<std::pair<std::string, std::string>> headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  const auto resp = post_json(options_.endpoint, headers, body.dump(), options_.timeout);
  raise_for_status(resp, "encoder");

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(resp.body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("encoder returned non-JSON body: ") + e.what());
  }
  const nlohmann::json* rows = &parsed;
  if (parsed.is_object() && parsed.contains("data")) rows = &parsed["data"];
  if (!rows->is_array() || rows->size() != texts.size()) {
    throw BackendError("encoder returned " + std::to_string(rows->is_array() ? rows->size() : 0) +
                       " vectors for " + std::to_string(texts.size()) + " inputs");
  }
  std::vector<Embedding> out;
  for (const auto& row : *rows) {
    const auto& arr = row.is_object() ? row.at("embedding") : row;
    auto values = arr.get<std::vector<double>>();
    std::size_t expected = dimension_.load();
    if (expected == 0) {
      dimension_.compare_exchange_strong(expected, values.size());
      expected = dimension_.load();
    }
    if (values.size() != expected) {
      throw BackendError("encoder returned dimension " + std::to_string(values.size()) +
                         ", expected " + std::to_string(expected));
    }
    out.push_back(Embedding::normalized(std::move(values)));
  }
  return out;
}

}  // namespace atomgraph
