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
#include <string>
#include <string_view>
#include <vector>

namespace atomgraph {

// ASCII case folding plus whitespace collapsing. Used as the merge key for
// entity canonical names and for sub-query deduplication.
std::string normalize_name(std::string_view text);

std::string trim(std::string_view text);

struct Token {
  std::string_view text;
  std::size_t begin = 0;  // byte offset in the source string
  std::size_t end = 0;
};

// Whitespace tokenizer. Views point into `text`.
std::vector<Token> whitespace_tokens(std::string_view text);

std::size_t count_tokens(std::string_view text);

// 64-bit FNV-1a. Stable across platforms, used for fixture keys and the
// hashing encoder.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace atomgraph
