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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomgraph/embedding.hpp"

namespace atomgraph {

// Shared text encoder. Atoms, entities and queries all go through the same
// instance so their embeddings live in one space.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Embedding encode(std::string_view text) const = 0;
  virtual std::vector<Embedding> encode_batch(std::span<const std::string> texts) const;
};

// Deterministic, network-free encoder: signed hashing of character trigrams
// of the normalized text into `dimension` buckets, then L2 normalization.
// Strings with many shared trigrams land close together.
class HashingEncoder final : public Encoder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed0a7e11a5c0deULL;

  explicit HashingEncoder(std::size_t dimension = 64, std::uint64_t seed = kDefaultSeed);

  std::size_t dimension() const override { return dimension_; }
  Embedding encode(std::string_view text) const override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

struct RemoteEncoderOptions {
  std::string endpoint;  // e.g. https://api.example.com/v1/embeddings
  std::string model;
  std::string api_key;
  std::size_t dimension = 0;  // 0: taken from the first response
  std::size_t batch_size = 32;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{60};
};

// Batch embedding endpoint speaking the common embeddings wire shape:
//   request  {"model": ..., "input": [text, ...]}
//   response {"data": [{"embedding": [..]}, ...]}  (a bare list of arrays is
//   also accepted)
class RemoteEncoder final : public Encoder {
 public:
  explicit RemoteEncoder(RemoteEncoderOptions options);

  std::size_t dimension() const override;
  Embedding encode(std::string_view text) const override;
  std::vector<Embedding> encode_batch(std::span<const std::string> texts) const override;

 private:
  std::vector<Embedding> request(std::span<const std::string> texts) const;

  RemoteEncoderOptions options_;
  mutable std::atomic<std::size_t> dimension_;
};

}  // namespace atomgraph
