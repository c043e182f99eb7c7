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

#include "atomgraph/vector_index.hpp"

#include <algorithm>
#include <numeric>
#include <span>

#include "atomgraph/errors.hpp"

namespace atomgraph {

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw InvalidArgument("index dimension must be positive");
}

void VectorIndex::add(std::string id, const Embedding& embedding) {
  if (embedding.dimension() != dimension_) {
    throw InvalidArgument("dimension mismatch adding '" + id + "': got " +
                          std::to_string(embedding.dimension()) + ", index has " +
                          std::to_string(dimension_));
  }
  ids_.push_back(std::move(id));
  auto v = embedding.values();
  matrix_.insert(matrix_.end(), v.begin(), v.end());
}

std::vector<double> VectorIndex::similarities(const Embedding& query) const {
  if (query.dimension() != dimension_) {
    throw InvalidArgument("query dimension " + std::to_string(query.dimension()) +
                          " does not match index dimension " + std::to_string(dimension_));
  }
  std::vector<double> sims(ids_.size());
  std::span<const double> all(matrix_);
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    sims[r] = std::clamp(dot(all.subspan(r * dimension_, dimension_), query.values()), -1.0, 1.0);
  }
  return sims;
}

std::vector<ScoredId> VectorIndex::top_k(const Embedding& query, std::size_t k) const {
  if (k == 0) throw InvalidArgument("top_k requires k >= 1");
  if (ids_.empty()) throw InvalidArgument("top_k on an empty index");
  const auto sims = similarities(query);
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n = std::min(k, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return ids_[a] < ids_[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    better);
  std::vector<ScoredId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({ids_[order[i]], sims[order[i]]});
  return out;
}

}  // namespace atomgraph
