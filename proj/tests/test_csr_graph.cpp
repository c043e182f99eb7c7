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

#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "atomgraph/csr_graph.hpp"
#include "atomgraph/errors.hpp"

using namespace atomgraph;

TEST_CASE("parallel edges merge and rows are symmetric and sorted") {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0}, {1, 0, 2.0}, {2, 1, 0.5}};
  const auto g = CsrGraph::from_edges(4, edges);
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 2);
  REQUIRE(g.degree(1) == 2);
  CHECK(g.neighbors(1)[0] == 0);
  CHECK(g.neighbors(1)[1] == 2);
  CHECK(g.weights(1)[0] == 3.0);
  CHECK(g.weights(0)[0] == 3.0);
  CHECK(g.weighted_degree(1) == 3.5);
  CHECK(g.degree(3) == 0);
  CHECK(g.average_degree() == doctest::Approx(1.0));
}

TEST_CASE("invalid edges are rejected") {
  const std::vector<WeightedEdge> loop{{1, 1, 1.0}};
  CHECK_THROWS_AS(CsrGraph::from_edges(2, loop), InvalidArgument);
  const std::vector<WeightedEdge> zero{{0, 1, 0.0}};
  CHECK_THROWS_AS(CsrGraph::from_edges(2, zero), InvalidArgument);
  const std::vector<WeightedEdge> out_of_range{{0, 5, 1.0}};
  CHECK_THROWS_AS(CsrGraph::from_edges(2, out_of_range), InvalidArgument);
}

TEST_CASE("clustering matches a triangle-count oracle") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 5 + rng() % 25;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng() % 4 == 0) {
          pairs.insert({i, j});
          edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), 1.0});
        }
      }
    }
    const auto g = CsrGraph::from_edges(n, edges);
    auto adj = [&](std::size_t a, std::size_t b) { return pairs.count({std::min(a, b), std::max(a, b)}) > 0; };
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::size_t> nb;
      for (std::size_t u = 0; u < n; ++u) {
        if (u != v && adj(u, v)) nb.push_back(u);
      }
      if (nb.size() < 2) continue;
      double tri = 0;
      for (std::size_t a = 0; a < nb.size(); ++a) {
        for (std::size_t b = a + 1; b < nb.size(); ++b) tri += adj(nb[a], nb[b]) ? 1 : 0;
      }
      total += tri / (static_cast<double>(nb.size()) * static_cast<double>(nb.size() - 1) / 2.0);
    }
    CHECK(g.average_clustering() == doctest::Approx(total / static_cast<double>(n)).epsilon(1e-12));
    CHECK(g.edge_count() == pairs.size());
    CHECK(g.average_degree() == doctest::Approx(2.0 * static_cast<double>(pairs.size()) / static_cast<double>(n)));
  }
}

TEST_CASE("complete graph has clustering 1") {
  std::vector<WeightedEdge> edges;
  for (NodeIndex i = 0; i < 5; ++i) {
    for (NodeIndex j = i + 1; j < 5; ++j) edges.push_back({i, j, 2.0});
  }
  CHECK(CsrGraph::from_edges(5, edges).average_clustering() == doctest::Approx(1.0));
  CHECK(CsrGraph{}.node_count() == 0);
}
