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

#include <thread>

#include "atomgraph/errors.hpp"
#include "atomgraph/llm_gateway.hpp"
#include "support.hpp"

using namespace atomgraph;
using nlohmann::json;

TEST_CASE("template rendering") {
  const PromptTemplate t{"t", "Q: {{question}} / {{ctx}} / {{question}}", SchemaTag::kText};
  CHECK(t.placeholders() == std::vector<std::string>{"question", "ctx"});
  CHECK(t.render({{"question", "why"}, {"ctx", "c"}, {"extra", "ignored"}}) == "Q: why / c / why");
  CHECK_THROWS_WITH_AS(t.render({{"question", "why"}}), doctest::Contains("ctx"), InvalidArgument);
}

TEST_CASE("builtin registry has every pipeline template with the right schema") {
  const auto reg = PromptRegistry::builtin();
  for (const char* name : {templates::kNer, templates::kUnifiedExtraction, templates::kComplexity,
                           templates::kDecomposition, templates::kAtomFilter, templates::kAbstractQa,
                           templates::kPreciseQa, templates::kClaimVerification}) {
    CHECK(reg.contains(name));
  }
  CHECK(reg.get("ner").schema == SchemaTag::kEntityList);
  CHECK(reg.get("atom_filter").schema == SchemaTag::kIndexList);
  CHECK(reg.get("abstract_qa").schema == SchemaTag::kText);
  CHECK(reg.get("unified_extraction").placeholders() == std::vector<std::string>{"entities", "passage"});
  CHECK_THROWS_AS(reg.get("nope"), InvalidArgument);
}

TEST_CASE("prompt overrides replace builtin text") {
  testing::TempDir dir("prompts");
  testing::write_file(dir / "ner.txt", "List entities in {{passage}}");
  auto reg = PromptRegistry::builtin();
  reg.load_overrides(dir.path());
  CHECK(reg.get("ner").text.rfind("List entities in", 0) == 0);
  CHECK(reg.get("ner").schema == SchemaTag::kEntityList);
}

TEST_CASE("payload parsing and validation") {
  CHECK(parse_json_payload("```json\n{\"entities\": [\"A\"]}\n```", SchemaTag::kEntityList) ==
        json{{"entities", {"A"}}});
  CHECK(parse_json_payload("{\"complexity\": 7}", SchemaTag::kComplexity)["complexity"] == 7);
  CHECK(parse_json_payload("{\"keep\": [0, 2]}", SchemaTag::kIndexList)["keep"] == json::array({0, 2}));
  CHECK(parse_json_payload("  free text ", SchemaTag::kText) == "free text");
  CHECK(parse_json_payload("{\"tp\":1,\"fp\":0,\"fn\":2}", SchemaTag::kClaimCounts)["fn"] == 2);

  const auto ex = parse_json_payload(
      R"({"atoms":[{"text":"A","entities":["A"]}],"triples":[{"head":"A","relation":"r","tail":"B"}]})",
      SchemaTag::kExtraction);
  CHECK(ex["atoms"][0]["span"].is_null());
  CHECK(ex["triples"][0] == json::array({"A", "r", "B"}));

  CHECK_THROWS_AS(parse_json_payload("not json", SchemaTag::kEntityList), ParseError);
  CHECK_THROWS_AS(parse_json_payload("{\"entities\": \"A\"}", SchemaTag::kEntityList), ParseError);
  CHECK_THROWS_AS(parse_json_payload("{\"complexity\": \"high\"}", SchemaTag::kComplexity), ParseError);
  CHECK_THROWS_AS(parse_json_payload("{\"sub_questions\": [{}]}", SchemaTag::kSubQuestions), ParseError);
  CHECK_THROWS_AS(parse_json_payload("{\"tp\": -1, \"fp\": 0, \"fn\": 0}", SchemaTag::kClaimCounts), ParseError);
  CHECK_THROWS_AS(parse_json_payload(R"({"atoms":[{"text":"A","entities":[],"span":[5,2]}],"triples":[]})",
                                     SchemaTag::kExtraction),
                  ParseError);
  CHECK_THROWS_AS(parse_json_payload("", SchemaTag::kText), ParseError);
  try {
    parse_json_payload("oops", SchemaTag::kIndexList);
  } catch (const ParseError& e) {
    CHECK(e.raw() == "oops");
  }
}

TEST_CASE("mock fixtures: exact beats match, first match wins, misses raise") {
  auto gw = testing::gateway_with({
      {{"template", "complexity"}, {"match", {{"question", "q"}}}, {"response", {{"complexity", 1}}}},
      {{"template", "complexity"}, {"match", {{"question", "q"}}}, {"response", {{"complexity", 2}}}},
      {{"template", "complexity"}, {"bindings", {{"question", "q"}}}, {"response", "{\"complexity\": 3}"}},
      {{"template", "complexity"}, {"match", json::object()}, {"response", {{"complexity", 9}}}},
  });
  CHECK(gw.complete("complexity", {{"question", "q"}}).payload["complexity"] == 3);
  CHECK(gw.complete("complexity", {{"question", "other"}}).payload["complexity"] == 9);
  CHECK_THROWS_AS(gw.complete("ner", {{"passage", "x"}}), FixtureMissError);

  auto by_key = testing::gateway_with({{{"template", "complexity"},
                                        {"key", fixture_key("complexity", {{"question", "k"}})},
                                        {"response", {{"complexity", 4}}}}});
  CHECK(by_key.complete("complexity", {{"question", "k"}}).payload["complexity"] == 4);
}

TEST_CASE("fixture keys depend on template and every binding") {
  const auto a = fixture_key("t", {{"x", "1"}, {"y", "2"}});
  CHECK(a == fixture_key("t", {{"y", "2"}, {"x", "1"}}));
  CHECK(a != fixture_key("u", {{"x", "1"}, {"y", "2"}}));
  CHECK(a != fixture_key("t", {{"x", "1"}, {"y", "3"}}));
  CHECK(a.size() == 16);
}

TEST_CASE("one repair attempt, then ParseError") {
  auto repaired = testing::gateway_with({{{"template", "atom_filter"},
                                          {"match", json::object()},
                                          {"response", "sure! [0, 1]"},
                                          {"repair_response", "{\"keep\": [0, 1]}"}}});
  const auto r = repaired.complete("atom_filter", {{"question", "q"}, {"candidates", "[0] a"}});
  CHECK(r.repaired);
  CHECK(r.payload["keep"] == json::array({0, 1}));
  CHECK(repaired.call_count() == 2);

  auto broken = testing::gateway_with(
      {{{"template", "atom_filter"}, {"match", json::object()}, {"response", "still not json"}}});
  CHECK_THROWS_AS(broken.complete("atom_filter", {{"question", "q"}, {"candidates", "[0] a"}}), ParseError);
  CHECK(broken.call_count() == 2);
}

TEST_CASE("usage accounting across gateway and nested scopes") {
  auto gw = testing::gateway_with(
      {{{"template", "complexity"}, {"match", json::object()}, {"response", "{\"complexity\": 1}"}}});
  UsageScope outer;
  {
    UsageScope inner;
    gw.complete("complexity", {{"question", "one two three"}});
    CHECK(inner.calls() == 1);
    CHECK(inner.total().completion == 2);  // {"complexity": 1} is two whitespace tokens
    CHECK(inner.total().prompt > 0);
  }
  gw.complete("complexity", {{"question", "x"}});
  CHECK(outer.calls() == 2);
  CHECK(outer.total() == gw.total_usage());
  CHECK(gw.usage_by_template().at("complexity") == gw.total_usage());

  // Scopes are per thread.
  std::thread([&] { gw.complete("complexity", {{"question", "y"}}); }).join();
  CHECK(outer.calls() == 2);
  CHECK(gw.call_count() == 3);
}
