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

#include "atomgraph/sieve.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

bool candidate_order(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.atom_id < b.atom_id;
}

std::vector<Candidate> top_k_atoms(std::span<const ScoredAtom> scores, std::size_t k, std::size_t query_position) {
  if (k == 0) throw InvalidArgument("top-k requires k >= 1");
  std::vector<Candidate> pool;
  for (const auto& s : scores) {
    if (s.score > 0.0) pool.push_back({s.atom_id, s.score, {query_position}});
  }
  if (pool.empty()) {
    spdlog::warn("all atom scores are zero; candidate set is empty");
    return pool;
  }
  const std::size_t take = std::min(k, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), candidate_order);
  pool.resize(take);
  return pool;
}

std::vector<Candidate> merge(std::span<const std::vector<Candidate>> sets) {
  std::map<std::string, Candidate> by_id;
  for (const auto& set : sets) {
    for (const auto& c : set) {
      auto [it, inserted] = by_id.try_emplace(c.atom_id, c);
      if (inserted) continue;
      it->second.score = std::max(it->second.score, c.score);
      auto& who = it->second.surfaced_by;
      who.insert(who.end(), c.surfaced_by.begin(), c.surfaced_by.end());
    }
  }
  std::vector<Candidate> out;
  out.reserve(by_id.size());
  for (auto& [id, c] : by_id) {
    std::sort(c.surfaced_by.begin(), c.surfaced_by.end());
    c.surfaced_by.erase(std::unique(c.surfaced_by.begin(), c.surfaced_by.end()), c.surfaced_by.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), candidate_order);
  return out;
}

namespace {

const KnowledgeAtom& lookup_atom(const AtomEntityGraph& graph, const std::string& id) {
  auto it = graph.atoms().find(id);
  if (it == graph.atoms().end()) throw InvalidArgument("candidate atom '" + id + "' is not in the graph");
  return it->second;
}

// Atoms with spans by span start, then atoms without spans by chunk. Ties by id.
bool document_order(const KnowledgeAtom& a, const KnowledgeAtom& b) {
  if (a.span_hint.has_value() != b.span_hint.has_value()) return a.span_hint.has_value();
  if (a.span_hint && a.span_hint->begin != b.span_hint->begin) return a.span_hint->begin < b.span_hint->begin;
  if (!a.span_hint && a.chunk_index != b.chunk_index) return a.chunk_index < b.chunk_index;
  return a.id < b.id;
}

}  // namespace

std::string format_candidates(std::span<const Candidate> candidates, const AtomEntityGraph& graph) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i) out += '\n';
    out += '[' + std::to_string(i) + "] " + lookup_atom(graph, candidates[i].atom_id).text;
  }
  return out;
}

FilterOutcome filter(const std::string& query, std::span<const Candidate> candidates, const AtomEntityGraph& graph,
                     LlmGateway& gateway) {
  FilterOutcome out;
  if (candidates.empty()) return out;
  nlohmann::json payload;
  try {
    payload = gateway
                  .complete(templates::kAtomFilter,
                            {{"question", query}, {"candidates", format_candidates(candidates, graph)}})
                  .payload;
  } catch (const ParseError& e) {
    spdlog::error("atom filter returned malformed output ({}); KEEPING ALL {} CANDIDATES", e.what(),
                  candidates.size());
    out.kept.assign(candidates.begin(), candidates.end());
    out.fail_open = true;
    return out;
  }
  std::set<std::size_t> keep;
  for (const auto& v : payload.at("keep")) {
    const long long i = v.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= candidates.size()) {
      out.discarded_indices.push_back(i);
      continue;
    }
    keep.insert(static_cast<std::size_t>(i));
  }
  if (!out.discarded_indices.empty()) {
    spdlog::warn("atom filter returned {} out-of-range indices; discarded", out.discarded_indices.size());
  }
  for (std::size_t i : keep) out.kept.push_back(candidates[i]);
  return out;
}

std::vector<CitationUnit> aggregate(std::span<const Candidate> kept, const AtomEntityGraph& graph) {
  struct Member {
    const KnowledgeAtom* atom;
    double score;
  };
  std::map<std::string, std::vector<Member>> groups;
  for (const auto& c : kept) {
    const auto& a = lookup_atom(graph, c.atom_id);
    groups[a.source_doc].push_back({&a, c.score});
  }

  struct Group {
    double best;
    std::string doc;
    std::vector<CitationUnit> units;
  };
  std::vector<Group> ordered;
  for (auto& [doc, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const Member& a, const Member& b) { return document_order(*a.atom, *b.atom); });
    Group g{0.0, doc, {}};
    std::vector<std::string> texts;
    auto flush = [&](CitationUnit& u) {
      for (std::size_t i = 0; i < texts.size(); ++i) u.text += (i ? " " : "") + texts[i];
      texts.clear();
      g.units.push_back(std::move(u));
    };
    std::optional<CitationUnit> open;
    for (const auto& m : members) {
      const auto& a = *m.atom;
      const bool joins = open && open->span && a.span_hint && a.span_hint->begin < open->span->end;
      if (!joins && open) {
        flush(*open);
        open.reset();
      }
      if (!open) {
        open = CitationUnit{doc, {}, a.span_hint, "", m.score};
      } else {
        open->span->end = std::max(open->span->end, a.span_hint->end);
        open->score = std::max(open->score, m.score);
      }
      open->atom_ids.push_back(a.id);
      if (std::find(texts.begin(), texts.end(), a.text) == texts.end()) texts.push_back(a.text);
      g.best = std::max(g.best, m.score);
    }
    if (open) flush(*open);
    std::stable_sort(g.units.begin(), g.units.end(),
                     [](const CitationUnit& a, const CitationUnit& b) { return a.score > b.score; });
    ordered.push_back(std::move(g));
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const Group& a, const Group& b) { return a.best > b.best; });

  std::vector<CitationUnit> out;
  for (auto& g : ordered) {
    for (auto& u : g.units) out.push_back(std::move(u));
  }
  return out;
}

namespace {

std::vector<const CitationUnit*> by_score(std::span<const CitationUnit> units) {
  std::vector<const CitationUnit*> order;
  for (const auto& u : units) order.push_back(&u);
  std::stable_sort(order.begin(), order.end(),
                   [](const CitationUnit* a, const CitationUnit* b) { return a->score > b->score; });
  return order;
}

}  // namespace

std::string serialize_evidence(std::span<const CitationUnit> units) {
  std::string out;
  std::size_t n = 0;
  for (const CitationUnit* u : by_score(units)) {
    if (n) out += '\n';
    out += '[' + std::to_string(++n) + "] " + u->text;
  }
  return out;
}

BudgetOutcome apply_budget(std::vector<CitationUnit> units, std::size_t max_tokens) {
  BudgetOutcome out;
  out.tokens = count_tokens(serialize_evidence(units));
  while (max_tokens != 0 && out.tokens > max_tokens && !units.empty()) {
    // Lowest score goes first; among equals, the one serialized last.
    std::size_t victim = 0;
    for (std::size_t i = 1; i < units.size(); ++i) {
      if (units[i].score <= units[victim].score) victim = i;
    }
    units.erase(units.begin() + static_cast<std::ptrdiff_t>(victim));
    ++out.dropped;
    out.tokens = count_tokens(serialize_evidence(units));
  }
  out.units = std::move(units);
  return out;
}

AnswerMode parse_answer_mode(std::string_view name) {
  if (name == "abstract") return AnswerMode::kAbstract;
  if (name == "precise") return AnswerMode::kPrecise;
  throw InvalidArgument("unknown answer mode '" + std::string(name) + "' (expected abstract or precise)");
}

const char* answer_mode_name(AnswerMode mode) { return mode == AnswerMode::kAbstract ? "abstract" : "precise"; }

std::string generate(const std::string& query, std::span<const CitationUnit> units, AnswerMode mode,
                     LlmGateway& gateway) {
  std::string evidence = serialize_evidence(units);
  if (units.empty()) {
    spdlog::warn("generating without evidence for query '{}'", query);
    evidence = kNoEvidenceNotice;
  }
  const char* tmpl = mode == AnswerMode::kAbstract ? templates::kAbstractQa : templates::kPreciseQa;
  return gateway.complete(tmpl, {{"evidence", evidence}, {"question", query}}).payload.get<std::string>();
}

void EvidenceBundle::check_nesting() const {
  std::set<std::string> r, s;
  for (const auto& c : merged) r.insert(c.atom_id);
  for (const auto& c : filtered) {
    if (!r.count(c.atom_id)) throw StateError("filtered atom '" + c.atom_id + "' is not a candidate");
    s.insert(c.atom_id);
  }
  for (const auto& u : units) {
    for (const auto& id : u.atom_ids) {
      if (!s.count(id)) throw StateError("citation atom '" + id + "' was not kept by the filter");
    }
  }
}

namespace {

nlohmann::json candidates_json(const std::vector<Candidate>& cs) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cs) arr.push_back({{"atom_id", c.atom_id}, {"score", c.score}, {"queries", c.surfaced_by}});
  return arr;
}

}  // namespace

nlohmann::json EvidenceBundle::to_json() const {
  nlohmann::json j;
  j["per_query"] = nlohmann::json::array();
  for (const auto& set : per_query) j["per_query"].push_back(candidates_json(set));
  j["candidates"] = candidates_json(merged);
  j["filtered"] = candidates_json(filtered);
  j["filter_fail_open"] = filter_fail_open;
  j["units"] = nlohmann::json::array();
  for (const auto& u : units) {
    nlohmann::json ju{{"source_doc", u.source_doc}, {"atom_ids", u.atom_ids}, {"text", u.text}, {"score", u.score}};
    if (u.span) ju["span"] = {u.span->begin, u.span->end};
    j["units"].push_back(std::move(ju));
  }
  j["dropped_units"] = dropped_units;
  j["evidence_tokens"] = evidence_tokens;
  return j;
}

}  // namespace atomgraph
