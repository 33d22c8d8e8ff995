#pragma once

#include <string>
#include <vector>

#include "keo/corpus.hpp"
#include "keo/embedding.hpp"
#include "keo/kg.hpp"

namespace keo {

struct ScoredCandidate {
  std::int64_t target = 0;  // node id or chunk id
  double score = 0.0;       // cosine in [-1, 1]
};

using SeedSet = std::vector<ScoredCandidate>;  // scores non-increasing, ids distinct

// Immutable exhaustive-scan index. Built once, queried concurrently.
class VectorIndex {
public:
  VectorIndex() = default;
  VectorIndex(std::size_t dim, std::string provider_name);

  void add(std::int64_t id, EmbeddingVector v);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& provider_name() const { return provider_; }

  // The k highest-cosine entries, ties broken by ascending id. Returns all
  // entries when k exceeds the index size; throws on an empty index.
  SeedSet top_k(const EmbeddingVector& query, std::size_t k) const;

  void save(const std::string& path) const;
  static VectorIndex load(const std::string& path);

private:
  std::size_t dim_ = 0;
  std::string provider_;
  std::vector<std::int64_t> ids_;
  std::vector<EmbeddingVector> vectors_;
};

VectorIndex build_node_index(const KnowledgeGraph& kg, const EmbeddingProvider& provider);
VectorIndex build_chunk_index(const std::vector<Chunk>& chunks,
                              const EmbeddingProvider& provider);

}  // namespace keo
