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

#include <cmath>
#include <random>

#include "atomgraph/encoder.hpp"
#include "atomgraph/errors.hpp"
#include "atomgraph/evaluator.hpp"
#include "support.hpp"

using namespace atomgraph;
using nlohmann::json;

namespace {

double cosine_oracle(const Embedding& ea, const Embedding& eb) {
  const auto a = ea.values(), b = eb.values();
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

const char* kQ1Answer = "Marie Curie was born in Warsaw [1].";
const char* kQ1Reference = "Marie Curie was born in Warsaw in 1867.";

}  // namespace

TEST_CASE("factual correctness") {
  CHECK(factual_correctness({2, 1, 1}) == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(factual_correctness({5, 0, 0}) == 1.0);
  CHECK(factual_correctness({0, 3, 2}) == 0.0);
  CHECK(factual_correctness({0, 0, 0}) == 0.0);
  CHECK(factual_correctness({1, 2, 0}) == factual_correctness({1, 0, 2}));
}

TEST_CASE("factual correctness properties") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::uint64_t> n(0, 40);
  for (int i = 0; i < 500; ++i) {
    const JudgedClaims c{n(rng), n(rng), n(rng)};
    const double f = factual_correctness(c);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    if (c.tp + c.fp + c.fn == 0) continue;
    CHECK(factual_correctness({c.tp + 1, c.fp, c.fn}) >= f);
    CHECK(factual_correctness({c.tp, c.fp + 1, c.fn}) <= f);
    CHECK(factual_correctness({c.tp, c.fp, c.fn + 1}) <= f);
    CHECK(factual_correctness({c.tp, c.fn, c.fp}) == f);
  }
}

TEST_CASE("combined accuracy") {
  const auto r = combine_accuracy(0.6667, 0.9, 0.7);
  CHECK(r.acc == doctest::Approx(0.73669).epsilon(1e-12));
  CHECK(combine_accuracy(1.0, 1.0).acc == 1.0);
  CHECK(combine_accuracy(0.0, 0.0).acc == 0.0);
  CHECK(combine_accuracy(0.3, 0.8, 1.0).acc == 0.3);
  CHECK(combine_accuracy(0.3, 0.8, 0.0).acc == 0.8);
  CHECK_THROWS_AS(combine_accuracy(0.5, 0.5, -0.01), InvalidArgument);
  CHECK_THROWS_AS(combine_accuracy(0.5, 0.5, 1.01), InvalidArgument);
  CHECK_THROWS_AS(combine_accuracy(0.5, 0.5, std::nan("")), InvalidArgument);
}

TEST_CASE("semantic similarity") {
  const HashingEncoder enc(64);
  const double ss = semantic_similarity(kQ1Answer, kQ1Reference, enc);
  CHECK(ss == doctest::Approx(cosine_oracle(enc.encode(kQ1Answer), enc.encode(kQ1Reference))).epsilon(1e-6));
  CHECK(semantic_similarity(kQ1Answer, kQ1Reference, enc) == semantic_similarity(kQ1Reference, kQ1Answer, enc));
  CHECK(semantic_similarity(kQ1Reference, kQ1Reference, enc) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(semantic_similarity("", kQ1Reference, enc) == 0.0);
  CHECK(semantic_similarity(kQ1Answer, "  ", enc) == 0.0);
}

TEST_CASE("claims judged through the gateway") {
  auto backend = std::make_shared<MockBackend>();
  backend->load_fixtures(testing::data_path("fixtures.jsonl"));
  LlmGateway gw(backend, PromptRegistry::builtin());
  CHECK(judge_claims(kQ1Answer, kQ1Reference, gw) == JudgedClaims{1, 0, 1});

  auto bad = testing::gateway_with({{{"template", "claim_verification"},
                                     {"match", json::object()},
                                     {"response", R"({"tp": -1, "fp": 0, "fn": 0})"}}});
  CHECK_THROWS_AS(judge_claims("a", "b", bad), ParseError);
}

TEST_CASE("evaluate over paired results") {
  testing::TempDir dir("eval");
  testing::write_file(dir / "results.jsonl",
                      "{\"id\":\"q1\",\"answer\":\"Marie Curie was born in Warsaw [1].\"}\n"
                      "{\"id\":\"q2\",\"answer\":\"The Curies discovered polonium and radium [1][2]. Marie Curie won "
                      "the 1903 Nobel Prize in Physics and the 1911 Nobel Prize in Chemistry [3][4].\"}\n"
                      "{\"id\":\"q3\",\"answer\":\"Marie Curie died in Passy, France, in 1934 [1].\"}\n");
  const auto items = pair_results((dir / "results.jsonl").string(), testing::data_path("references.jsonl").string());
  REQUIRE(items.size() == 3);
  CHECK(items[0].reference == kQ1Reference);

  auto backend = std::make_shared<MockBackend>();
  backend->load_fixtures(testing::data_path("fixtures.jsonl"));
  LlmGateway gw(backend, PromptRegistry::builtin());
  const HashingEncoder enc(64);
  const auto report = evaluate(items, gw, enc, 0.7, 2);
  REQUIRE(report.rows.size() == 3);
  const double fc[] = {2.0 / 3.0, 1.0, 0.8};
  double mean_fc = 0, mean_acc = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& row = report.rows[i];
    CHECK(row.id == items[i].id);
    CHECK(row.result.fc == doctest::Approx(fc[i]).epsilon(1e-12));
    const double ss = cosine_oracle(enc.encode(items[i].answer), enc.encode(items[i].reference));
    CHECK(row.result.ss == doctest::Approx(ss).epsilon(1e-6));
    CHECK(row.result.acc == doctest::Approx(0.7 * fc[i] + 0.3 * ss).epsilon(1e-6));
    mean_fc += fc[i] / 3;
    mean_acc += row.result.acc / 3;
  }
  CHECK(report.mean_fc == doctest::Approx(mean_fc).epsilon(1e-12));
  CHECK(report.mean_acc == doctest::Approx(mean_acc).epsilon(1e-12));
  CHECK(report.to_json()["rows"].size() == 3);
  CHECK(report.summary_table().find("q2") != std::string::npos);

  testing::write_file(dir / "orphan.jsonl", "{\"id\":\"q9\",\"answer\":\"x\"}\n");
  CHECK_THROWS_AS(pair_results((dir / "orphan.jsonl").string(), testing::data_path("references.jsonl").string()),
                  InvalidArgument);
}
