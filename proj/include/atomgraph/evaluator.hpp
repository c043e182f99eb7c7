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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomgraph/encoder.hpp"
#include "atomgraph/llm_gateway.hpp"

namespace atomgraph {

struct JudgedClaims {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  friend bool operator==(const JudgedClaims&, const JudgedClaims&) = default;
};

struct AccResult {
  double fc = 0.0;
  double ss = 0.0;
  double acc = 0.0;
  double alpha = 0.7;
};

// 2TP / (2TP + FP + FN). With no claims at all the score is 0 and a warning
// is logged.
double factual_correctness(const JudgedClaims& claims);

// Cosine of the two encodings, not clipped. An empty answer or reference
// scores 0 with a warning.
double semantic_similarity(const std::string& answer, const std::string& reference, const Encoder& encoder);

// acc = alpha * fc + (1 - alpha) * ss. Throws InvalidArgument unless alpha is
// in [0, 1].
AccResult combine_accuracy(double fc, double ss, double alpha = 0.7);

AccResult answer_accuracy(const JudgedClaims& claims, const std::string& answer, const std::string& reference,
                          const Encoder& encoder, double alpha = 0.7);

// One claim_verification call. Malformed counts raise ParseError.
JudgedClaims judge_claims(const std::string& answer, const std::string& reference, LlmGateway& gateway);

struct EvalItem {
  std::string id;
  std::string query;
  std::string answer;
  std::string reference;
};

struct EvalRow {
  std::string id;
  std::string query;
  JudgedClaims claims;
  AccResult result;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double alpha = 0.7;
  double mean_fc = 0.0;
  double mean_ss = 0.0;
  double mean_acc = 0.0;

  nlohmann::json to_json() const;
  std::string summary_table() const;
};

EvalReport evaluate(const std::vector<EvalItem>& items, LlmGateway& gateway, const Encoder& encoder,
                    double alpha = 0.7, std::size_t workers = 1);

// Pairs query result records (JSON Lines with "id" and "answer") with
// references (JSON Lines with "id" and "reference", or "answer"). Every result
// needs a reference.
std::vector<EvalItem> pair_results(const std::string& results_path, const std::string& references_path);

}  // namespace atomgraph
