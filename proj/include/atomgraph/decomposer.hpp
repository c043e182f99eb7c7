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
#include <string>
#include <vector>

#include <json.hpp>

#include "atomgraph/llm_gateway.hpp"

namespace atomgraph {

struct SubQuery {
  std::string question;
  std::string focus;
};

struct QueryPlan {
  std::string query;
  double complexity = 0.0;
  std::vector<SubQuery> sub_queries;
  // query first, then sub-queries when decomposition triggered.
  std::vector<std::string> effective_set;
  bool decomposed = false;

  nlohmann::json to_json() const;
};

struct PlanOptions {
  double complexity_threshold = 6.5;
  std::size_t max_sub_questions = 3;
};

// Complexity score in [0, 10] from the scoring prompt, clamped.
double score_complexity(const std::string& query, LlmGateway& gateway);

// Decomposition runs when complexity >= threshold. Sub-queries identical to
// the query (after name normalization) or to an earlier sub-query are dropped;
// the rest are truncated to max_sub_questions with a warning.
QueryPlan plan_from_score(const std::string& query, double complexity, LlmGateway& gateway,
                          const PlanOptions& options = {});

QueryPlan plan(const std::string& query, LlmGateway& gateway, const PlanOptions& options = {});

}  // namespace atomgraph
