#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace keo {

// Every knob the method description leaves open, pinned to defaults here and
// echoed into run manifests so no run is ambiguous about its settings.
struct RetrievalConfig {
  // Retrieval
  std::size_t k_seeds = 10;        // top-k entity seeds
  std::size_t k_chunks = 5;        // top-k text chunks
  std::size_t m_hops = 2;          // expansion radius
  std::size_t chunk_size = 600;    // characters
  std::size_t chunk_overlap = 100; // characters
  std::size_t prompt_budget = 8000;

  // Community summarization
  double leiden_resolution = 1.0;
  std::size_t leaf_summary_budget = 400;
  std::size_t parent_summary_budget = 600;
  std::size_t context_budget = 6000;
  std::string summarizer = "fallback";  // fallback | llm

  // Prompting / KG construction
  std::size_t node_hint_budget = 500;

  // Embeddings
  std::string embed_provider = "fallback";  // fallback | remote
  std::size_t embed_dim = 256;
  std::string embed_url = "http://127.0.0.1:8089/v1/embeddings";
  std::string embed_model = "keo-embed";

  // Chat endpoint
  std::string chat_url = "http://127.0.0.1:8089/v1/chat/completions";
  std::string chat_model = "keo-chat";
  double temperature = 0.0;

  std::uint64_t rng_seed = 0;
  std::size_t jobs = 1;

  void validate() const;

  nlohmann::json to_json() const;
  static RetrievalConfig from_json(const nlohmann::json& j);

  // Flat key-value JSON document. Unknown keys are an error; missing keys
  // keep their defaults.
  static RetrievalConfig load(const std::string& path);

  // KEO_CHAT_URL / KEO_EMBED_URL override the endpoint fields when set.
  void apply_env();
};

}  // namespace keo
