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

#include <filesystem>

#include "atomgraph/encoder.hpp"
#include "atomgraph/errors.hpp"
#include "atomgraph/ingest.hpp"
#include "atomgraph/snapshot.hpp"
#include "support.hpp"

using namespace atomgraph;
namespace fs = std::filesystem;

namespace {

AtomEntityGraph fixture_graph() {
  MockBackend backend;
  backend.load_fixtures(testing::data_path("fixtures.jsonl"));
  LlmGateway gw(std::make_shared<MockBackend>(backend), PromptRegistry::builtin());
  return build_graph(read_corpus(testing::data_path("corpus.jsonl")), gw, HashingEncoder(64)).graph;
}

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("save then load reproduces the graph bit for bit") {
  const auto g = fixture_graph();
  testing::TempDir dir("snap");
  save_snapshot(g, dir / "a");
  const auto loaded = load_snapshot(dir / "a");
  CHECK(loaded.frozen());
  CHECK(loaded == g);
  CHECK(loaded.topology() == g.topology());

  save_snapshot(loaded, dir / "b");
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename().string();
    CHECK_MESSAGE(testing::read_file(entry.path()) == testing::read_file(dir / "b" / name), name);
  }
}

TEST_CASE("saving requires a frozen graph") {
  testing::TempDir dir("snap");
  CHECK_THROWS_AS(save_snapshot(AtomEntityGraph{}, dir / "x"), StateError);
}

TEST_CASE("corrupt snapshots are rejected with a SnapshotError") {
  const auto g = fixture_graph();
  testing::TempDir dir("snap");
  const auto base = dir / "base";
  save_snapshot(g, base);

  auto corrupt = [&](const std::string& file, const std::function<std::string(std::string)>& edit) {
    const auto target = dir / ("bad_" + file);
    fs::remove_all(target);
    fs::copy(base, target);
    testing::write_file(target / file, edit(testing::read_file(target / file)));
    return target;
  };

  SUBCASE("missing directory") { CHECK_THROWS_AS(load_snapshot(dir / "nope"), SnapshotError); }
  SUBCASE("version mismatch") {
    const auto p = corrupt("manifest.json", [](std::string s) {
      return replace_first(s, "\"format_version\": 1", "\"format_version\": 99");
    });
    CHECK_THROWS_AS(load_snapshot(p), SnapshotError);
  }
  SUBCASE("malformed record line") {
    const auto p = corrupt("atoms.jsonl", [](std::string s) { return "{not json\n" + s; });
    CHECK_THROWS_AS(load_snapshot(p), SnapshotError);
  }
  SUBCASE("truncated float blob") {
    const auto p = corrupt("floats.bin", [](std::string s) { return s.substr(0, s.size() - 3); });
    CHECK_THROWS_AS(load_snapshot(p), SnapshotError);
  }
  SUBCASE("missing edge file") {
    fs::copy(base, dir / "missing");
    fs::remove(dir / "missing" / "relevance.jsonl");
    CHECK_THROWS_AS(load_snapshot(dir / "missing"), SnapshotError);
  }
  SUBCASE("containment weight other than one") {
    const auto p = corrupt("containment.jsonl", [](std::string s) {
      return replace_first(s, "\"weight\":1", "\"weight\":2");
    });
    CHECK_THROWS_AS(load_snapshot(p), SnapshotError);
  }
  SUBCASE("dangling entity reference") {
    const auto p = corrupt("relevance.jsonl", [](std::string s) { return replace_first(s, "e:", "e:zz"); });
    CHECK_THROWS_AS(load_snapshot(p), SnapshotError);
  }
}
