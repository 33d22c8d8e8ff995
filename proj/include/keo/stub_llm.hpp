#pragma once

#include <memory>
#include <string>

#include <json.hpp>

namespace keo::stub {

// Deterministic chat completion for a request body: recognizes the pipeline's
// prompt families (triplet extraction, question generation, answering,
// absolute and pairwise judging) and produces format-conforming output that
// is a pure function of the request. Stands in for a live model at desk
// scale.
std::string stub_chat_response(const nlohmann::json& request);

// Local OpenAI-style endpoint backed by stub_chat_response plus a
// hashed-ngram /v1/embeddings route. Binds 127.0.0.1.
class StubLlmServer {
public:
  // port 0 picks a free port.
  explicit StubLlmServer(int port = 0);
  ~StubLlmServer();

  StubLlmServer(const StubLlmServer&) = delete;
  StubLlmServer& operator=(const StubLlmServer&) = delete;

  int port() const;
  std::string chat_url() const;
  std::string embed_url() const;

  // Blocks until stop() is called from another thread (CLI usage).
  void serve_forever();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace keo::stub
