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

#include "atomgraph/evaluator.hpp"

#include <fstream>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"
#include "atomgraph/parallel.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

double factual_correctness(const JudgedClaims& c) {
  const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp) + static_cast<double>(c.fn);
  if (denom == 0.0) {
    spdlog::warn("factual correctness with no claims on either side; scoring 0");
    return 0.0;
  }
  return 2.0 * static_cast<double>(c.tp) / denom;
}

double semantic_similarity(const std::string& answer, const std::string& reference, const Encoder& encoder) {
  if (trim(answer).empty() || trim(reference).empty()) {
    spdlog::warn("semantic similarity with an empty {}; scoring 0", trim(answer).empty() ? "answer" : "reference");
    return 0.0;
  }
  return cosine(encoder.encode(answer), encoder.encode(reference));
}

AccResult combine_accuracy(double fc, double ss, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("metric alpha must be in [0, 1]");
  return {fc, ss, alpha * fc + (1.0 - alpha) * ss, alpha};
}

AccResult answer_accuracy(const JudgedClaims& claims, const std::string& answer, const std::string& reference,
                          const Encoder& encoder, double alpha) {
  return combine_accuracy(factual_correctness(claims), semantic_similarity(answer, reference, encoder), alpha);
}

JudgedClaims judge_claims(const std::string& answer, const std::string& reference, LlmGateway& gateway) {
  const auto r = gateway.complete(templates::kClaimVerification, {{"reference", reference}, {"answer", answer}});
  return {r.payload.at("tp").get<std::uint64_t>(), r.payload.at("fp").get<std::uint64_t>(),
          r.payload.at("fn").get<std::uint64_t>()};
}

EvalReport evaluate(const std::vector<EvalItem>& items, LlmGateway& gateway, const Encoder& encoder, double alpha,
                    std::size_t workers) {
  EvalReport report;
  report.alpha = alpha;
  report.rows.resize(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) {
    const auto& it = items[i];
    const auto claims = judge_claims(it.answer, it.reference, gateway);
    report.rows[i] = {it.id, it.query, claims, answer_accuracy(claims, it.answer, it.reference, encoder, alpha)};
  });
  for (const auto& r : report.rows) {
    report.mean_fc += r.result.fc;
    report.mean_ss += r.result.ss;
    report.mean_acc += r.result.acc;
  }
  if (!report.rows.empty()) {
    const double n = static_cast<double>(report.rows.size());
    report.mean_fc /= n;
    report.mean_ss /= n;
    report.mean_acc /= n;
  }
  return report;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"id", r.id},
                         {"query", r.query},
                         {"tp", r.claims.tp},
                         {"fp", r.claims.fp},
                         {"fn", r.claims.fn},
                         {"fc", r.result.fc},
                         {"ss", r.result.ss},
                         {"acc", r.result.acc}});
  }
  return {{"alpha", alpha},
          {"count", rows.size()},
          {"mean", {{"fc", mean_fc}, {"ss", mean_ss}, {"acc", mean_acc}}},
          {"rows", rows_json}};
}

std::string EvalReport::summary_table() const {
  std::size_t width = 2;
  for (const auto& r : rows) width = std::max(width, r.id.size());
  std::string out = fmt::format("{:<{}}  {:>4} {:>4} {:>4}  {:>7} {:>7} {:>7}\n", "id", width, "tp", "fp", "fn",
                                "FC", "SS", "ACC");
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}  {:>4} {:>4} {:>4}  {:>7.4f} {:>7.4f} {:>7.4f}\n", r.id, width, r.claims.tp,
                       r.claims.fp, r.claims.fn, r.result.fc, r.result.ss, r.result.acc);
  }
  out += fmt::format("{:<{}}  {:>14}  {:>7.4f} {:>7.4f} {:>7.4f}   (n={}, alpha={})\n", "mean", width, "", mean_fc,
                     mean_ss, mean_acc, rows.size(), alpha);
  return out;
}

namespace {

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string id_of(const nlohmann::json& j) {
  if (!j.contains("id")) throw InvalidArgument("record without an \"id\": " + j.dump());
  return j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
}

}  // namespace

std::vector<EvalItem> pair_results(const std::string& results_path, const std::string& references_path) {
  std::map<std::string, std::string> refs;
  for (const auto& j : read_jsonl(references_path)) {
    const auto key = j.contains("reference") ? "reference" : "answer";
    if (!j.contains(key) || !j[key].is_string()) throw InvalidArgument("reference record without text: " + j.dump());
    refs[id_of(j)] = j[key].get<std::string>();
  }
  std::vector<EvalItem> items;
  for (const auto& j : read_jsonl(results_path)) {
    EvalItem it;
    it.id = id_of(j);
    it.query = j.value("query", "");
    it.answer = j.value("answer", "");
    auto ref = refs.find(it.id);
    if (ref == refs.end()) throw InvalidArgument("no reference for result '" + it.id + "'");
    it.reference = ref->second;
    items.push_back(std::move(it));
  }
  return items;
}

}  // namespace atomgraph
