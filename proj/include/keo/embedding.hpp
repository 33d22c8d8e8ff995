#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace keo {

using EmbeddingVector = std::vector<double>;

// dot(a,b) / (|a||b|). Throws on dimension mismatch or a zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  // Deterministic per (provider, text). text must be non-empty.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Deterministic offline provider: signed hashing of character trigrams over
// the lowercased text, L2-normalized. No model, no network; its only job is
// to make similar strings score similar and runs reproducible.
class HashedNgramProvider final : public EmbeddingProvider {
public:
  explicit HashedNgramProvider(std::size_t dim = 256, std::size_t ngram = 3);
  std::size_t dim() const override { return dim_; }
  std::string name() const override;
  EmbeddingVector embed(std::string_view text) const override;

private:
  std::size_t dim_;
  std::size_t ngram_;
};

// JSON-over-HTTP embedding endpoint:
//   POST {"input": [text], "model": model} -> {"data": [{"embedding": [...]}]}
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
  RemoteEmbeddingProvider(std::string base_url, std::string model);
  std::size_t dim() const override;
  std::string name() const override;
  EmbeddingVector embed(std::string_view text) const override;

private:
  std::string base_url_;
  std::string model_;
  mutable std::size_t dim_ = 0;  // learned from the first response
};

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind,
                                                 const std::string& base_url,
                                                 const std::string& model, std::size_t dim);

}  // namespace keo
