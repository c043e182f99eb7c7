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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "atomgraph/graph.hpp"
#include "atomgraph/llm_gateway.hpp"
#include "atomgraph/resonance.hpp"

namespace atomgraph {

struct Candidate {
  std::string atom_id;
  double score = 0.0;
  std::vector<std::size_t> surfaced_by;  // positions in the query's effective set
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Score descending, ties by ascending atom id.
bool candidate_order(const Candidate& a, const Candidate& b);

// The min(k, positive-score atoms) best atoms in candidate order. Every
// result is tagged with `query_position`. Throws InvalidArgument on k == 0.
std::vector<Candidate> top_k_atoms(std::span<const ScoredAtom> scores, std::size_t k,
                                   std::size_t query_position = 0);

// Union of candidate sets. An atom present in several sets keeps its maximum
// score and the sorted union of the queries that surfaced it.
std::vector<Candidate> merge(std::span<const std::vector<Candidate>> sets);

// "[i] atom text" lines, i counting from 0 in candidate order.
std::string format_candidates(std::span<const Candidate> candidates, const AtomEntityGraph& graph);

struct FilterOutcome {
  std::vector<Candidate> kept;
  std::vector<long long> discarded_indices;  // out of range in the model reply
  bool fail_open = false;
};

// One atom_filter call judged against `query` (the original question).
// Kept candidates retain their order. Malformed output after the gateway's
// repair attempt keeps every candidate and logs an error.
FilterOutcome filter(const std::string& query, std::span<const Candidate> candidates, const AtomEntityGraph& graph,
                     LlmGateway& gateway);

struct CitationUnit {
  std::string source_doc;
  std::vector<std::string> atom_ids;  // document order
  std::optional<SpanHint> span;       // union of member spans when all have one
  std::string text;
  double score = 0.0;  // best member score
  friend bool operator==(const CitationUnit&, const CitationUnit&) = default;
};

// Groups atoms by source document. Within a document, atoms whose span hints
// overlap (transitively) form one unit whose text is the concatenation of the
// distinct member texts in document order; atoms without a span stay single.
// Documents are ordered by best member score descending, units within a
// document by score descending.
std::vector<CitationUnit> aggregate(std::span<const Candidate> kept, const AtomEntityGraph& graph);

// Numbered evidence block "[1] text" ordered by unit score descending.
std::string serialize_evidence(std::span<const CitationUnit> units);

struct BudgetOutcome {
  std::vector<CitationUnit> units;
  std::size_t dropped = 0;
  std::size_t tokens = 0;  // whitespace tokens of the serialized evidence
};

// Drops lowest-scored units until the serialized evidence fits in
// max_tokens. max_tokens == 0 disables the cap.
BudgetOutcome apply_budget(std::vector<CitationUnit> units, std::size_t max_tokens);

enum class AnswerMode { kAbstract, kPrecise };

AnswerMode parse_answer_mode(std::string_view name);
const char* answer_mode_name(AnswerMode mode);

inline constexpr const char* kNoEvidenceNotice = "(no evidence was retrieved for this question)";

// One QA call with the units as numbered evidence. An empty unit list is
// passed as kNoEvidenceNotice.
std::string generate(const std::string& query, std::span<const CitationUnit> units, AnswerMode mode,
                     LlmGateway& gateway);

struct EvidenceBundle {
  std::vector<std::vector<Candidate>> per_query;  // R(q'), aligned with the effective set
  std::vector<Candidate> merged;                  // R(q)
  std::vector<Candidate> filtered;                // S(q)
  bool filter_fail_open = false;
  std::vector<CitationUnit> units;  // A*(q) after the token budget
  std::size_t dropped_units = 0;
  std::size_t evidence_tokens = 0;

  // Throws StateError unless unit atoms ⊆ S(q) ⊆ R(q).
  void check_nesting() const;
  nlohmann::json to_json() const;
};

}  // namespace atomgraph
