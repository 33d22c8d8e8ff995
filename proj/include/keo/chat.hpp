#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace keo {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatParams {
  std::string model;
  double temperature = 0.0;
};

enum class ChatMode { kLive, kRecord, kReplay };

ChatMode chat_mode_from_string(const std::string& s);
std::string to_string(ChatMode m);

// Append-only JSONL store of request/response transcripts keyed by request
// hash. Writes are serialized; lookups are safe from concurrent readers once
// loading is done.
class TranscriptStore {
public:
  TranscriptStore() = default;
  explicit TranscriptStore(std::string path, bool load_existing = true);

  std::optional<std::string> lookup(const std::string& request_hash) const;
  void append(const std::string& request_hash, const nlohmann::json& request,
              const std::string& response);
  std::size_t size() const { return entries_.size(); }
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::map<std::string, std::string> entries_;
  mutable std::mutex mu_;
};

// Chat-completion client against an OpenAI-style JSON endpoint.
//   live:   POST and return the completion
//   record: live + persist the transcript
//   replay: serve from the store, no network
class ChatClient {
public:
  ChatClient(std::string endpoint_url, ChatMode mode, TranscriptStore* store);

  std::string complete(const std::vector<ChatMessage>& messages, const ChatParams& params);

  // Canonical request hash: JSON with sorted keys, compact separators,
  // FNV-1a 64 in hex. Stable under message field-order permutations.
  static std::string request_hash(const std::vector<ChatMessage>& messages,
                                  const ChatParams& params);
  static nlohmann::json request_body(const std::vector<ChatMessage>& messages,
                                     const ChatParams& params);

  ChatMode mode() const { return mode_; }

private:
  std::string url_;
  ChatMode mode_;
  TranscriptStore* store_;  // required for record/replay
};

}  // namespace keo
