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
#include <cstdint>
#include <span>
#include <vector>

namespace atomgraph {

using NodeIndex = std::uint32_t;

struct WeightedEdge {
  NodeIndex u = 0;
  NodeIndex v = 0;
  double weight = 0.0;
};

// Undirected weighted graph in compressed sparse row form. Parallel edges
// between the same pair are merged by summing weights; each pair shows up in
// both endpoint rows. Neighbor lists are sorted ascending.
class CsrGraph {
 public:
  CsrGraph() = default;

  // Self-loops are rejected; weights must be positive and finite.
  static CsrGraph from_edges(std::size_t node_count, std::span<const WeightedEdge> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Number of distinct unordered pairs (the simple projection).
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(NodeIndex v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }
  double weighted_degree(NodeIndex v) const { return weighted_degree_[v]; }

  double average_degree() const;
  // Mean local clustering coefficient over all nodes; nodes with degree < 2
  // contribute 0.
  double average_clustering() const;

  friend bool operator==(const CsrGraph&, const CsrGraph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeIndex> neighbors_;
  std::vector<double> weights_;
  std::vector<double> weighted_degree_;
};

}  // namespace atomgraph
