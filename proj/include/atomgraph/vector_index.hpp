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

#include <cstddef>
#include <string>
#include <vector>

#include "atomgraph/embedding.hpp"

namespace atomgraph {

struct ScoredId {
  std::string id;
  double similarity = 0.0;
  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

// Exact cosine index: a dense row-major matrix scanned in full per query.
// Append-only while building; queries are const and safe to run concurrently.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dimension);

  void add(std::string id, const Embedding& embedding);

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::string& id_at(std::size_t row) const { return ids_[row]; }

  // min(k, size()) results ordered by similarity descending, ties by
  // ascending id.
  std::vector<ScoredId> top_k(const Embedding& query, std::size_t k) const;

  // Similarity of the query against every row, in insertion order.
  std::vector<double> similarities(const Embedding& query) const;

 private:
  std::size_t dimension_;
  std::vector<std::string> ids_;
  std::vector<double> matrix_;
};

}  // namespace atomgraph
