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

#include "atomgraph/text_util.hpp"

using namespace atomgraph;

TEST_CASE("normalize_name folds ASCII case and collapses whitespace") {
  CHECK(normalize_name("  Marie \t Curie\n") == "marie curie");
  CHECK(normalize_name("RADIUM") == "radium");
  CHECK(normalize_name("") == "");
  CHECK(normalize_name(" \t ") == "");
  CHECK(normalize_name(normalize_name("A  B")) == normalize_name("A  B"));
}

TEST_CASE("trim") {
  CHECK(trim("  x y \n") == "x y");
  CHECK(trim("") == "");
  CHECK(trim("\t\n") == "");
}

TEST_CASE("whitespace_tokens report byte offsets into the source") {
  const std::string s = " ab  c\td ";
  const auto toks = whitespace_tokens(s);
  REQUIRE(toks.size() == 3);
  for (const auto& t : toks) CHECK(s.substr(t.begin, t.end - t.begin) == t.text);
  CHECK(toks[0].begin == 1);
  CHECK(toks[2].text == "d");
  CHECK(count_tokens(s) == 3);
  CHECK(count_tokens("") == 0);
}

TEST_CASE("fnv1a64 published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hex64 is fixed width lowercase") {
  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0x85944171f73967e8ULL) == "85944171f73967e8");
}
