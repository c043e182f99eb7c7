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

#include "atomgraph/decomposer.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

nlohmann::json QueryPlan::to_json() const {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : sub_queries) subs.push_back({{"question", s.question}, {"focus", s.focus}});
  return {{"query", query},
          {"complexity", complexity},
          {"decomposed", decomposed},
          {"sub_queries", subs},
          {"effective_set", effective_set}};
}

double score_complexity(const std::string& query, LlmGateway& gateway) {
  const auto r = gateway.complete(templates::kComplexity, {{"question", query}});
  return std::clamp(r.payload.at("complexity").get<double>(), 0.0, 10.0);
}

QueryPlan plan_from_score(const std::string& query, double complexity, LlmGateway& gateway,
                          const PlanOptions& options) {
  QueryPlan p;
  p.query = query;
  p.complexity = complexity;
  p.effective_set.push_back(query);
  if (complexity < options.complexity_threshold || options.max_sub_questions == 0) return p;

  p.decomposed = true;
  const auto r = gateway.complete(templates::kDecomposition,
                                  {{"question", query}, {"max_sub_questions", std::to_string(options.max_sub_questions)}});
  std::set<std::string> seen{normalize_name(query)};
  for (const auto& s : r.payload.at("sub_questions")) {
    SubQuery sq{trim(s.at("question").get<std::string>()), s.value("focus", "")};
    if (sq.question.empty() || !seen.insert(normalize_name(sq.question)).second) continue;
    p.sub_queries.push_back(std::move(sq));
  }
  if (p.sub_queries.size() > options.max_sub_questions) {
    spdlog::warn("decomposition returned {} sub-questions, keeping the first {}", p.sub_queries.size(),
                 options.max_sub_questions);
    p.sub_queries.resize(options.max_sub_questions);
  }
  for (const auto& s : p.sub_queries) p.effective_set.push_back(s.question);
  return p;
}

QueryPlan plan(const std::string& query, LlmGateway& gateway, const PlanOptions& options) {
  if (trim(query).empty()) throw InvalidArgument("query is empty");
  return plan_from_score(query, score_complexity(query, gateway), gateway, options);
}

}  // namespace atomgraph
