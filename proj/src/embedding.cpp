#include "keo/embedding.hpp"

#include <cmath>

#include "keo/errors.hpp"
#include "keo/net.hpp"
#include "keo/util.hpp"

namespace keo {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

HashedNgramProvider::HashedNgramProvider(std::size_t dim, std::size_t ngram)
    : dim_(dim), ngram_(ngram) {
  if (dim_ == 0 || ngram_ == 0) throw ValidationError("provider needs dim > 0 and ngram > 0");
}

std::string HashedNgramProvider::name() const {
  return "hashed-ngram/" + std::to_string(dim_) + "/" + std::to_string(ngram_);
}

EmbeddingVector HashedNgramProvider::embed(std::string_view text) const {
  if (text.empty()) throw ValidationError("embed: empty text");
  // Pad with spaces so even single-character inputs produce n-grams and word
  // boundaries contribute features.
  std::string padded = " " + to_lower(text) + " ";
  EmbeddingVector v(dim_, 0.0);
  for (std::size_t i = 0; i + ngram_ <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, ngram_));
    const std::size_t bucket = static_cast<std::size_t>(h % dim_);
    const double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
    v[bucket] += sign;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    // Signed features cancelled out; fall back to a single deterministic bucket.
    v[static_cast<std::size_t>(fnv1a64(padded) % dim_)] = 1.0;
    norm = 1.0;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string base_url, std::string model)
    : base_url_(std::move(base_url)), model_(std::move(model)) {
  if (base_url_.empty()) throw ValidationError("remote embedding provider needs a base URL");
}

std::size_t RemoteEmbeddingProvider::dim() const { return dim_; }

std::string RemoteEmbeddingProvider::name() const { return "remote/" + model_; }

EmbeddingVector RemoteEmbeddingProvider::embed(std::string_view text) const {
  if (text.empty()) throw ValidationError("embed: empty text");
  nlohmann::json body{{"input", {std::string(text)}}, {"model", model_}};
  const nlohmann::json res = net::post_json(base_url_, body);
  if (!res.contains("data") || !res["data"].is_array() || res["data"].empty() ||
      !res["data"][0].contains("embedding") || !res["data"][0]["embedding"].is_array()) {
    throw TransportError("embedding response missing data[0].embedding", false);
  }
  EmbeddingVector v;
  for (const auto& x : res["data"][0]["embedding"]) {
    if (!x.is_number()) throw TransportError("non-numeric embedding component", false);
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw TransportError("non-finite embedding component", false);
    v.push_back(d);
  }
  if (v.empty()) throw TransportError("empty embedding vector", false);
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) {
    throw TransportError("embedding dimension changed mid-index: " + std::to_string(v.size()) +
                             " vs " + std::to_string(dim_),
                         false);
  }
  return v;
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind,
                                                 const std::string& base_url,
                                                 const std::string& model, std::size_t dim) {
  if (kind == "fallback") return std::make_unique<HashedNgramProvider>(dim);
  if (kind == "remote") return std::make_unique<RemoteEmbeddingProvider>(base_url, model);
  throw ValidationError("unknown embedding provider kind: " + kind);
}

}  // namespace keo
