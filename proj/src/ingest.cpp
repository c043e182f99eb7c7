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

#include "atomgraph/ingest.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "atomgraph/errors.hpp"
#include "atomgraph/parallel.hpp"
#include "atomgraph/text_util.hpp"

namespace atomgraph {

using nlohmann::json;

std::vector<CorpusDocument> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open corpus " + path.string());
  std::vector<CorpusDocument> docs;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);
    CorpusDocument d;
    try {
      const auto j = json::parse(line);
      d.doc_id = j.at("doc_id").get<std::string>();
      d.text = j.at("text").get<std::string>();
      if (j.contains("metadata") && j["metadata"].is_object()) {
        for (const auto& [k, v] : j["metadata"].items()) d.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    } catch (const json::exception& e) {
      throw InvalidArgument(where + ": " + e.what());
    }
    if (d.doc_id.empty()) throw InvalidArgument(where + ": empty doc_id");
    if (trim(d.text).empty()) throw InvalidArgument(where + ": document '" + d.doc_id + "' has empty text");
    if (!ids.insert(d.doc_id).second) throw InvalidArgument(where + ": duplicate doc_id '" + d.doc_id + "'");
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Chunk> chunk(const CorpusDocument& doc, const ChunkOptions& options) {
  if (options.size_tokens == 0 || options.overlap_tokens >= options.size_tokens) {
    throw InvalidArgument("chunking requires size > overlap >= 0");
  }
  const auto tokens = whitespace_tokens(doc.text);
  std::vector<Chunk> out;
  const std::size_t n = tokens.size();
  const std::size_t stride = options.size_tokens - options.overlap_tokens;
  for (std::size_t start = 0; start < n; start += stride) {
    const std::size_t end = std::min(start + options.size_tokens, n);
    Chunk c;
    c.doc_id = doc.doc_id;
    c.index = static_cast<std::uint32_t>(out.size());
    c.token_begin = start;
    c.token_end = end;
    c.char_begin = tokens[start].begin;
    c.char_end = tokens[end - 1].end;
    c.text = doc.text.substr(c.char_begin, c.char_end - c.char_begin);
    out.push_back(std::move(c));
    if (end == n) break;
  }
  return out;
}

void ExtractionRecord::validate() const {
  std::set<std::string> known;
  for (const auto& e : entities) {
    const auto k = normalize_name(e);
    if (k.empty()) throw InvalidArgument("extraction record has an empty entity name");
    known.insert(k);
  }
  for (const auto& a : atoms) {
    if (trim(a.text).empty()) throw InvalidArgument("extraction record has an empty atom");
    for (const auto& e : a.entities) {
      if (known.count(normalize_name(e)) == 0) {
        throw InvalidArgument("atom mentions '" + e + "' which is not in the entity list");
      }
    }
  }
  for (const auto& t : triples) {
    for (const auto* e : {&t[0], &t[2]}) {
      if (known.count(normalize_name(*e)) == 0) {
        throw InvalidArgument("triple endpoint '" + *e + "' is not in the entity list");
      }
    }
    if (trim(t[1]).empty()) throw InvalidArgument("triple has an empty relation label");
  }
}

json ExtractionRecord::to_json() const {
  json atoms_j = json::array();
  for (const auto& a : atoms) {
    json span = nullptr;
    if (a.span) span = {a.span->begin, a.span->end};
    atoms_j.push_back({{"text", a.text}, {"entities", a.entities}, {"span", span}});
  }
  return {{"doc_id", doc_id}, {"chunk", chunk_index}, {"entities", entities}, {"atoms", atoms_j}, {"triples", triples}};
}

ExtractionRecord ExtractionRecord::from_json(const json& j) {
  ExtractionRecord r;
  r.doc_id = j.at("doc_id").get<std::string>();
  r.chunk_index = j.value("chunk", 0U);
  r.entities = j.at("entities").get<std::vector<std::string>>();
  for (const auto& a : j.at("atoms")) {
    ExtractedAtom atom;
    atom.text = a.at("text").get<std::string>();
    atom.entities = a.at("entities").get<std::vector<std::string>>();
    if (a.contains("span") && !a["span"].is_null()) {
      atom.span = SpanHint{a["span"].at(0).get<std::size_t>(), a["span"].at(1).get<std::size_t>()};
    }
    r.atoms.push_back(std::move(atom));
  }
  for (const auto& t : j.at("triples")) r.triples.push_back(t.get<std::array<std::string, 3>>());
  return r;
}

namespace {
std::string entity_list_binding(const std::vector<std::string>& entities) { return json(entities).dump(); }
}  // namespace

std::vector<json> fixture_entries(const ExtractionRecord& record, const Chunk& chunk) {
  json atoms = json::array();
  for (const auto& a : record.atoms) {
    json span = nullptr;
    if (a.span) span = {a.span->begin, a.span->end};
    atoms.push_back({{"text", a.text}, {"entities", a.entities}, {"span", span}});
  }
  return {
      {{"template", templates::kNer},
       {"bindings", {{"passage", chunk.text}}},
       {"response", json{{"entities", record.entities}}.dump()}},
      {{"template", templates::kUnifiedExtraction},
       {"bindings", {{"passage", chunk.text}, {"entities", entity_list_binding(record.entities)}}},
       {"response", json{{"atoms", atoms}, {"triples", record.triples}}.dump()}},
  };
}

ExtractionRecord extract(const Chunk& chunk, LlmGateway& gateway) {
  ExtractionRecord rec;
  rec.doc_id = chunk.doc_id;
  rec.chunk_index = chunk.index;

  const auto ner = gateway.complete(templates::kNer, {{"passage", chunk.text}});
  std::set<std::string> seen;
  for (const auto& e : ner.payload.at("entities")) {
    auto name = trim(e.get<std::string>());
    if (!name.empty() && seen.insert(normalize_name(name)).second) rec.entities.push_back(name);
  }

  const auto joint = gateway.complete(templates::kUnifiedExtraction,
                                      {{"passage", chunk.text}, {"entities", entity_list_binding(rec.entities)}});
  auto remember = [&](const std::string& name) {
    if (seen.insert(normalize_name(name)).second) rec.entities.push_back(name);
  };
  for (const auto& a : joint.payload.at("atoms")) {
    ExtractedAtom atom;
    atom.text = trim(a.at("text").get<std::string>());
    if (atom.text.empty()) continue;
    for (const auto& e : a.at("entities")) {
      auto name = trim(e.get<std::string>());
      if (name.empty()) continue;
      remember(name);
      atom.entities.push_back(name);
    }
    if (!a.at("span").is_null()) {
      atom.span = SpanHint{a["span"][0].get<std::size_t>(), a["span"][1].get<std::size_t>()};
    }
    rec.atoms.push_back(std::move(atom));
  }
  for (const auto& t : joint.payload.at("triples")) {
    std::array<std::string, 3> tr{trim(t[0].get<std::string>()), trim(t[1].get<std::string>()),
                                  trim(t[2].get<std::string>())};
    if (tr[0].empty() || tr[1].empty() || tr[2].empty()) continue;
    remember(tr[0]);
    remember(tr[2]);
    rec.triples.push_back(std::move(tr));
  }
  rec.validate();
  return rec;
}

std::string entity_id_for(const std::string& name) { return "e:" + normalize_name(name); }

std::string atom_id_for(const std::string& doc_id, std::uint32_t chunk_index, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "/c%04u/a%03zu", chunk_index, ordinal);
  return doc_id + buf;
}

void add_records(AtomEntityGraph& graph, const std::string& doc_id, const std::vector<Chunk>& chunks,
                 const std::vector<ExtractionRecord>& records) {
  std::vector<EntityNode> entities;
  std::set<std::string> entity_ids;
  std::vector<KnowledgeAtom> atoms;
  std::vector<Triple> triples;
  auto add_entity = [&](const std::string& name) {
    auto id = entity_id_for(name);
    if (entity_ids.insert(id).second) entities.push_back(EntityNode{id, trim(name), std::nullopt, 0});
    return id;
  };
  for (const auto& rec : records) {
    rec.validate();
    if (rec.chunk_index >= chunks.size()) {
      throw InvalidArgument("record for " + doc_id + " refers to chunk " + std::to_string(rec.chunk_index) +
                            " which does not exist");
    }
    const auto& ch = chunks[rec.chunk_index];
    for (const auto& e : rec.entities) add_entity(e);
    for (std::size_t j = 0; j < rec.atoms.size(); ++j) {
      const auto& a = rec.atoms[j];
      KnowledgeAtom atom;
      atom.id = atom_id_for(doc_id, rec.chunk_index, j);
      atom.text = trim(a.text);
      atom.source_doc = doc_id;
      atom.chunk_index = rec.chunk_index;
      if (a.span) {
        const std::size_t len = ch.char_end - ch.char_begin;
        const std::size_t b = std::min(a.span->begin, len);
        const std::size_t e = std::min(std::max(a.span->end, b), len);
        atom.span_hint = SpanHint{ch.char_begin + b, ch.char_begin + e};
      }
      for (const auto& name : a.entities) atom.entity_ids.push_back(entity_id_for(name));
      atoms.push_back(std::move(atom));
    }
    for (const auto& t : rec.triples) {
      triples.push_back(Triple{entity_id_for(t[0]), trim(t[1]), entity_id_for(t[2]), doc_id});
    }
  }
  graph.add_document_extraction(doc_id, std::move(entities), std::move(atoms), std::move(triples));
}

void embed_graph(AtomEntityGraph& graph, const Encoder& encoder) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (const auto& [id, e] : graph.entities()) {
    if (!e.embedding) {
      ids.push_back(id);
      texts.push_back(e.canonical_name);
    }
  }
  const std::size_t entity_part = ids.size();
  for (const auto& [id, a] : graph.atoms()) {
    if (!a.embedding) {
      ids.push_back(id);
      texts.push_back(a.text);
    }
  }
  auto vectors = encoder.encode_batch(texts);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i < entity_part) {
      graph.set_entity_embedding(ids[i], std::move(vectors[i]));
    } else {
      graph.set_atom_embedding(ids[i], std::move(vectors[i]));
    }
  }
}

json BuildReport::to_json() const {
  return {{"documents", documents},
          {"failed_documents", failed_documents},
          {"chunks", chunks},
          {"failed_chunks", failed_chunks},
          {"failures", failures},
          {"graph",
           {{"nodes", stats.node_count},
            {"entities", stats.entity_count},
            {"atoms", stats.atom_count},
            {"edges", stats.edge_count_by_kind.total()},
            {"related", stats.edge_count_by_kind.relevance},
            {"synonym", stats.edge_count_by_kind.synonym},
            {"containment", stats.edge_count_by_kind.containment},
            {"avg_degree", stats.avg_degree},
            {"avg_clustering", stats.avg_clustering}}}};
}

BuildResult build_graph(const std::vector<CorpusDocument>& corpus, LlmGateway& gateway, const Encoder& encoder,
                        const BuildOptions& options) {
  if (corpus.empty()) throw BuildError("corpus is empty");

  // Documents are assembled in doc_id order regardless of input order.
  std::vector<const CorpusDocument*> docs;
  for (const auto& d : corpus) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(), [](auto* a, auto* b) { return a->doc_id < b->doc_id; });

  struct Job {
    std::size_t doc;
    const Chunk* chunk;
  };
  std::vector<std::vector<Chunk>> chunks(docs.size());
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    chunks[i] = chunk(*docs[i], options.chunking);
    for (const auto& c : chunks[i]) jobs.push_back({i, &c});
  }

  std::vector<std::optional<ExtractionRecord>> records(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), options.workers, [&](std::size_t j) {
    try {
      records[j] = extract(*jobs[j].chunk, gateway);
    } catch (const Error& e) {
      errors[j] = e.what();
    }
  });

  BuildResult result;
  auto& report = result.report;
  report.documents = docs.size();
  report.chunks = jobs.size();
  std::vector<std::vector<ExtractionRecord>> per_doc(docs.size());
  std::vector<std::size_t> ok_chunks(docs.size(), 0);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& job = jobs[j];
    if (records[j]) {
      per_doc[job.doc].push_back(std::move(*records[j]));
      ok_chunks[job.doc]++;
    } else {
      report.failed_chunks++;
      auto msg = job.chunk->doc_id + "#" + std::to_string(job.chunk->index) + ": " + errors[j];
      spdlog::warn("extraction failed for {}", msg);
      report.failures.push_back(std::move(msg));
    }
  }

  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (ok_chunks[i] == 0) {
      report.failed_documents++;
      continue;
    }
    try {
      add_records(result.graph, docs[i]->doc_id, chunks[i], per_doc[i]);
    } catch (const Error& e) {
      report.failed_documents++;
      report.failures.push_back(docs[i]->doc_id + ": " + e.what());
      spdlog::warn("document {} rejected: {}", docs[i]->doc_id, e.what());
    }
  }
  if (report.failed_documents == report.documents) {
    throw BuildError("all " + std::to_string(report.documents) + " documents failed extraction");
  }
  if (result.graph.node_count() == 0) throw BuildError("extraction produced an empty graph");

  embed_graph(result.graph, encoder);
  result.graph.build_relevance_edges();
  result.graph.build_synonym_edges(options.synonym);
  result.graph.freeze();
  report.stats = result.graph.compute_stats();
  return result;
}

}  // namespace atomgraph
