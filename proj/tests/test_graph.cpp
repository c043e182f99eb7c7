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

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "atomgraph/encoder.hpp"
#include "atomgraph/engine.hpp"
#include "atomgraph/errors.hpp"
#include "atomgraph/graph.hpp"
#include "atomgraph/ingest.hpp"
#include "atomgraph/text_util.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace atomgraph;
using nlohmann::json;

using testing::assemble;
using testing::random_extractions;

TEST_CASE("edge families match brute-force oracles on random extraction sets") {
  std::mt19937_64 rng(2024);
  const HashingEncoder enc(64);
  std::size_t synonym_total = 0;
  for (int round = 0; round < 100; ++round) {
    const auto g = random_extractions(rng);
    auto graph = assemble(g, enc, {});

    const auto containment = graph.containment_edges();
    CHECK(containment.size() == testing::containment_oracle(g));
    for (const auto& c : containment) CHECK(c.weight == 1.0);

    const auto labels = testing::relevance_oracle(g);
    REQUIRE(graph.relevance_edges().size() == labels.size());
    for (const auto& e : graph.relevance_edges()) {
      CHECK(e.first < e.second);
      CHECK(e.weight == labels.at({e.first, e.second}).size());
    }

    const auto expected_syn = testing::synonym_oracle(graph, enc, 0.8);
    REQUIRE(graph.synonym_edges().size() == expected_syn.size());
    for (std::size_t i = 0; i < expected_syn.size(); ++i) {
      CHECK(graph.synonym_edges()[i].first == expected_syn[i].first);
      CHECK(graph.synonym_edges()[i].second == expected_syn[i].second);
      CHECK(graph.synonym_edges()[i].weight >= 0.8);
    }
    synonym_total += expected_syn.size();
  }
  CHECK(synonym_total > 0);
}

TEST_CASE("small k keeps the union of per-entity nearest neighbours") {
  std::mt19937_64 rng(99);
  const HashingEncoder enc(64);
  for (int round = 0; round < 30; ++round) {
    const auto g = random_extractions(rng);
    const SynonymParams params{1, 0.3};
    auto graph = assemble(g, enc, params);
    std::vector<std::pair<std::string, Embedding>> ents;
    for (const auto& [id, e] : graph.entities()) ents.emplace_back(id, enc.encode(e.canonical_name));
    std::set<std::pair<std::string, std::string>> expected;
    for (std::size_t i = 0; i < ents.size(); ++i) {
      std::size_t best = ents.size();
      double best_sim = -2.0;
      for (std::size_t j = 0; j < ents.size(); ++j) {
        if (j == i) continue;
        const double s = cosine(ents[i].second, ents[j].second);
        if (s > best_sim) {  // strict, so ties keep the smaller id
          best_sim = s;
          best = j;
        }
      }
      if (best < ents.size() && best_sim >= params.threshold) {
        expected.insert({std::min(ents[i].first, ents[best].first), std::max(ents[i].first, ents[best].first)});
      }
    }
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& e : graph.synonym_edges()) got.insert({e.first, e.second});
    CHECK(got == expected);
  }
}

TEST_CASE("fixture corpus graph equals the golden expectation") {
  auto gw = testing::gateway_with({});
  MockBackend backend;
  backend.load_fixtures(testing::data_path("fixtures.jsonl"));
  LlmGateway gateway(std::make_shared<MockBackend>(backend), PromptRegistry::builtin());
  const HashingEncoder enc(64);
  const auto result = build_graph(read_corpus(testing::data_path("corpus.jsonl")), gateway, enc);
  const auto& graph = result.graph;

  std::ifstream in(testing::data_path("expected_graph.json"));
  const auto golden = json::parse(in);
  std::vector<std::string> names;
  for (const auto& [id, e] : graph.entities()) names.push_back(normalize_name(e.canonical_name));
  CHECK(names == golden["entities"].get<std::vector<std::string>>());
  CHECK(graph.atom_count() == golden["atom_count"].get<std::size_t>());
  CHECK(graph.containment_count() == golden["containment_count"].get<std::size_t>());

  REQUIRE(graph.relevance_edges().size() == golden["relevance"].size());
  for (std::size_t i = 0; i < golden["relevance"].size(); ++i) {
    const auto& r = golden["relevance"][i];
    CHECK(graph.relevance_edges()[i].first == "e:" + r["a"].get<std::string>());
    CHECK(graph.relevance_edges()[i].second == "e:" + r["b"].get<std::string>());
    CHECK(graph.relevance_edges()[i].weight == r["weight"].get<std::uint32_t>());
  }
  REQUIRE(graph.synonym_edges().size() == golden["synonym"].size());
  for (std::size_t i = 0; i < golden["synonym"].size(); ++i) {
    const auto& s = golden["synonym"][i];
    CHECK(graph.synonym_edges()[i].first == "e:" + s["a"].get<std::string>());
    CHECK(graph.synonym_edges()[i].second == "e:" + s["b"].get<std::string>());
    CHECK(graph.synonym_edges()[i].weight == doctest::Approx(s["cosine"].get<double>()).epsilon(1e-12));
  }
  const auto stats = graph.compute_stats();
  CHECK(stats.node_count == stats.entity_count + stats.atom_count);
  CHECK(stats.edge_count_by_kind.total() == graph.topology().edge_count());
}

TEST_CASE("entity merging, self relations and frozen state") {
  AtomEntityGraph g;
  g.add_document_extraction("d1", {{"e:a", "A", std::nullopt, 0}, {"e:b", "B", std::nullopt, 0}},
                            {{"d1/x", "A meets B", "d1", 0, std::nullopt, {"e:a", "e:b"}, std::nullopt}},
                            {{"e:a", "meets", "e:b", "d1"}, {"e:b", "meets", "e:a", "d1"}, {"e:a", "is", "e:a", "d1"},
                             {"e:a", "knows", "e:b", "d1"}});
  // Same canonical name under a different spelling merges into e:a.
  g.add_document_extraction("d2", {{"e:alias", "  a ", std::nullopt, 0}},
                            {{"d2/x", "A alone", "d2", 0, std::nullopt, {"e:alias"}, std::nullopt}}, {});
  CHECK(g.entity_count() == 2);
  CHECK(g.atoms().at("d2/x").entity_ids == std::vector<std::string>{"e:a"});

  const auto& rel = g.build_relevance_edges();
  REQUIRE(rel.size() == 1);
  CHECK(rel[0].weight == 2);

  const HashingEncoder enc(8);
  embed_graph(g, enc);
  g.build_synonym_edges({});
  g.freeze();
  CHECK(g.frozen());
  CHECK_NOTHROW(g.freeze());
  CHECK_THROWS_AS(g.add_document_extraction("d3", {}, {}, {}), StateError);
  CHECK_THROWS_AS(g.build_relevance_edges(), StateError);
  CHECK(g.node_count() == 4);
  CHECK(g.kind(0) == NodeKind::kEntity);
  CHECK(g.kind(2) == NodeKind::kAtom);
  CHECK(g.node_id(2) == "d1/x");
  CHECK(g.index_of("e:b") == NodeIndex{1});
  CHECK_FALSE(g.index_of("nope").has_value());
  CHECK(g.find_entity_by_name("A") == std::optional<std::string>("e:a"));

  AtomEntityGraph unfrozen;
  CHECK_THROWS_AS(unfrozen.topology(), StateError);
}

TEST_CASE("invalid extractions leave the graph untouched") {
  AtomEntityGraph g;
  g.add_document_extraction("d1", {{"e:a", "A", std::nullopt, 0}},
                            {{"d1/x", "A", "d1", 0, std::nullopt, {"e:a"}, std::nullopt}}, {});
  const AtomEntityGraph before = g;
  CHECK_THROWS_AS(g.add_document_extraction("d2", {{"e:b", "B", std::nullopt, 0}},
                                            {{"d2/x", "B", "d2", 0, std::nullopt, {"e:zzz"}, std::nullopt}}, {}),
                  GraphError);
  CHECK_THROWS_AS(g.add_document_extraction("d2", {{"e:b", "B", std::nullopt, 0}},
                                            {{"d1/x", "dup", "d2", 0, std::nullopt, {"e:b"}, std::nullopt}}, {}),
                  GraphError);
  CHECK_THROWS_AS(g.add_document_extraction("d2", {{"e:b", "B", std::nullopt, 0}},
                                            {{"d2/x", "B", "d2", 0, SpanHint{5, 2}, {"e:b"}, std::nullopt}}, {}),
                  GraphError);
  CHECK(g == before);
}

TEST_CASE("re-ingesting an identical document is a no-op") {
  AtomEntityGraph g;
  auto add = [&] {
    g.add_document_extraction("d1", {{"e:a", "A", std::nullopt, 0}},
                              {{"d1/x", "A", "d1", 0, std::nullopt, {"e:a"}, std::nullopt}}, {});
  };
  add();
  const AtomEntityGraph once = g;
  add();
  CHECK(g == once);
}

TEST_CASE("embedding dimensions must agree") {
  AtomEntityGraph g;
  g.add_document_extraction("d1", {{"e:a", "A", std::nullopt, 0}, {"e:b", "B", std::nullopt, 0}},
                            {{"d1/x", "A", "d1", 0, std::nullopt, {"e:a"}, std::nullopt}}, {});
  g.set_entity_embedding("e:a", Embedding::normalized({1, 0}));
  CHECK_THROWS_AS(g.set_entity_embedding("e:b", Embedding::normalized({1, 0, 0})), GraphError);
  CHECK_THROWS_AS(g.build_synonym_edges({}), GraphError);  // e:b has no embedding yet
}
