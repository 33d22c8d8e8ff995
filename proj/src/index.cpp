#include "keo/index.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

VectorIndex::VectorIndex(std::size_t dim, std::string provider_name)
    : dim_(dim), provider_(std::move(provider_name)) {}

void VectorIndex::add(std::int64_t id, EmbeddingVector v) {
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) throw ValidationError("index: vector dimension mismatch");
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("index: non-finite vector component");
  }
  ids_.push_back(id);
  vectors_.push_back(std::move(v));
}

SeedSet VectorIndex::top_k(const EmbeddingVector& query, std::size_t k) const {
  if (ids_.empty()) throw ValidationError("top_k over an empty index");
  if (k == 0) throw ValidationError("top_k requires k >= 1");
  SeedSet scored;
  scored.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    scored.push_back(ScoredCandidate{ids_[i], cosine(query, vectors_[i])});
  }
  const std::size_t n = std::min(k, scored.size());
  auto better = [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.target < b.target;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), better);
  scored.resize(n);
  return scored;
}

void VectorIndex::save(const std::string& path) const {
  json entries = json::array();
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    entries.push_back(json{{"id", ids_[i]}, {"vector", vectors_[i]}});
  }
  json j{{"format", "keo-index"},
         {"version", 1},
         {"dim", dim_},
         {"provider", provider_},
         {"count", ids_.size()},
         {"entries", std::move(entries)}};
  write_file(path, j.dump(2) + "\n");
}

VectorIndex VectorIndex::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("index file " + path + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "keo-index") throw ParseError("not a keo index file: " + path);
  VectorIndex idx(j.value("dim", std::size_t{0}), j.value("provider", ""));
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw ParseError("index file missing entries array: " + path);
  }
  for (const auto& e : j["entries"]) {
    idx.add(e.at("id").get<std::int64_t>(), e.at("vector").get<EmbeddingVector>());
  }
  if (j.contains("count") && j["count"].get<std::size_t>() != idx.size()) {
    throw ParseError("index entry count mismatch in " + path);
  }
  return idx;
}

VectorIndex build_node_index(const KnowledgeGraph& kg, const EmbeddingProvider& provider) {
  VectorIndex idx(0, provider.name());
  for (const auto& n : kg.nodes()) idx.add(n.id, provider.embed(n.surface));
  return idx;
}

VectorIndex build_chunk_index(const std::vector<Chunk>& chunks,
                              const EmbeddingProvider& provider) {
  VectorIndex idx(0, provider.name());
  for (const auto& c : chunks) idx.add(c.id, provider.embed(c.text));
  return idx;
}

}  // namespace keo
