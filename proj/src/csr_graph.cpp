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

#include "atomgraph/csr_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atomgraph/errors.hpp"

namespace atomgraph {

CsrGraph CsrGraph::from_edges(std::size_t node_count, std::span<const WeightedEdge> edges) {
  struct Half {
    NodeIndex from;
    NodeIndex to;
    double w;
  };
  std::vector<Half> halves;
  halves.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (e.u == e.v) throw InvalidArgument("self-loop on node " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("edge weight must be positive and finite");
    }
    halves.push_back({e.u, e.v, e.weight});
    halves.push_back({e.v, e.u, e.weight});
  }
  std::sort(halves.begin(), halves.end(), [](const Half& a, const Half& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });

  CsrGraph g;
  g.offsets_.assign(node_count + 1, 0);
  g.weighted_degree_.assign(node_count, 0.0);
  for (std::size_t i = 0; i < halves.size();) {
    const auto& h = halves[i];
    double w = 0.0;
    std::size_t j = i;
    for (; j < halves.size() && halves[j].from == h.from && halves[j].to == h.to; ++j) {
      w += halves[j].w;
    }
    g.neighbors_.push_back(h.to);
    g.weights_.push_back(w);
    g.offsets_[h.from + 1]++;
    g.weighted_degree_[h.from] += w;
    i = j;
  }
  for (std::size_t v = 0; v < node_count; ++v) g.offsets_[v + 1] += g.offsets_[v];
  return g;
}

double CsrGraph::average_degree() const {
  const auto n = node_count();
  if (n == 0) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(n);
}

double CsrGraph::average_clustering() const {
  const auto n = node_count();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (NodeIndex v = 0; v < n; ++v) {
    const auto nv = neighbors(v);
    const std::size_t d = nv.size();
    if (d < 2) continue;
    // Each neighbor pair (a, b) with a < b that is itself an edge closes a
    // triangle through v.
    std::size_t links = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto na = neighbors(nv[i]);
      auto it = std::upper_bound(na.begin(), na.end(), nv[i]);
      auto jt = nv.begin() + static_cast<std::ptrdiff_t>(i) + 1;
      while (it != na.end() && jt != nv.end()) {
        if (*it < *jt) {
          ++it;
        } else if (*jt < *it) {
          ++jt;
        } else {
          ++links;
          ++it;
          ++jt;
        }
      }
    }
    total += 2.0 * static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1));
  }
  return total / static_cast<double>(n);
}

}  // namespace atomgraph
