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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomgraph/encoder.hpp"
#include "atomgraph/graph.hpp"
#include "atomgraph/llm_gateway.hpp"

namespace atomgraph {

struct CorpusDocument {
  std::string doc_id;
  std::string text;
  std::map<std::string, std::string> metadata;
};

// Corpus file: JSON Lines, one {"doc_id", "text", "metadata"?} per line.
// Rejects duplicate ids and empty texts.
std::vector<CorpusDocument> read_corpus(const std::filesystem::path& path);

struct ChunkOptions {
  std::size_t size_tokens = 256;
  std::size_t overlap_tokens = 32;
};

struct Chunk {
  std::string doc_id;
  std::uint32_t index = 0;
  std::size_t token_begin = 0;  // [token_begin, token_end) in the document token stream
  std::size_t token_end = 0;
  std::size_t char_begin = 0;  // byte range covered in the document text
  std::size_t char_end = 0;
  std::string text;
};

// Sliding window over whitespace tokens with stride size - overlap. The last
// window ends at the final token. An empty document yields no chunks.
std::vector<Chunk> chunk(const CorpusDocument& doc, const ChunkOptions& options = {});

struct ExtractedAtom {
  std::string text;
  std::vector<std::string> entities;  // surface names
  std::optional<SpanHint> span;        // relative to the chunk text
};

struct ExtractionRecord {
  std::string doc_id;
  std::uint32_t chunk_index = 0;
  std::vector<std::string> entities;  // the entity-recognition output, in order
  std::vector<ExtractedAtom> atoms;
  std::vector<std::array<std::string, 3>> triples;

  // Every name an atom or triple mentions must appear (after name
  // normalization) in `entities`. Throws InvalidArgument otherwise.
  void validate() const;

  nlohmann::json to_json() const;
  static ExtractionRecord from_json(const nlohmann::json& j);
};

// The two mock-gateway fixture entries (entity recognition, joint extraction)
// that make extract(chunk) reproduce `record`.
std::vector<nlohmann::json> fixture_entries(const ExtractionRecord& record, const Chunk& chunk);

// Entity recognition followed by joint atom/triple extraction with the entity
// list bound. Names mentioned by atoms or triples but missing from the entity
// list are appended to it, so the record always validates.
ExtractionRecord extract(const Chunk& chunk, LlmGateway& gateway);

struct BuildOptions {
  ChunkOptions chunking;
  SynonymParams synonym;
  std::size_t workers = 1;
};

struct BuildReport {
  std::size_t documents = 0;
  std::size_t failed_documents = 0;
  std::size_t chunks = 0;
  std::size_t failed_chunks = 0;
  std::vector<std::string> failures;  // "doc_id#chunk: message"
  GraphStats stats;

  nlohmann::json to_json() const;
};

struct BuildResult {
  AtomEntityGraph graph;  // frozen
  BuildReport report;
};

// Stable ids derived from extraction provenance.
std::string entity_id_for(const std::string& name);
std::string atom_id_for(const std::string& doc_id, std::uint32_t chunk_index, std::size_t ordinal);

// Assembles one document's chunk records into the graph (no embeddings).
void add_records(AtomEntityGraph& graph, const std::string& doc_id, const std::vector<Chunk>& chunks,
                 const std::vector<ExtractionRecord>& records);

// Embeds every entity (by canonical name) and atom (by text) lacking an
// embedding.
void embed_graph(AtomEntityGraph& graph, const Encoder& encoder);

// Corpus -> frozen graph. Per-chunk extraction failures are logged and
// skipped; documents whose chunks all fail are counted as failed. Throws
// BuildError when every document fails or the graph ends up empty.
BuildResult build_graph(const std::vector<CorpusDocument>& corpus, LlmGateway& gateway, const Encoder& encoder,
                        const BuildOptions& options = {});

}  // namespace atomgraph
