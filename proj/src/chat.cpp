#include "keo/chat.hpp"

#include <chrono>
#include <fstream>

#include "keo/errors.hpp"
#include "keo/net.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

ChatMode chat_mode_from_string(const std::string& s) {
  if (s == "live") return ChatMode::kLive;
  if (s == "record") return ChatMode::kRecord;
  if (s == "replay") return ChatMode::kReplay;
  throw ValidationError("mode must be live, record, or replay (got \"" + s + "\")");
}

std::string to_string(ChatMode m) {
  switch (m) {
    case ChatMode::kLive: return "live";
    case ChatMode::kRecord: return "record";
    case ChatMode::kReplay: return "replay";
  }
  return "?";
}

TranscriptStore::TranscriptStore(std::string path, bool load_existing)
    : path_(std::move(path)) {
  if (!load_existing) return;
  std::ifstream in(path_);
  if (!in) return;  // a store that does not exist yet is simply empty
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("transcript store " + path_ + ": " + e.what(), ln);
    }
    if (!j.contains("hash") || !j.contains("response")) {
      throw ParseError("transcript store " + path_ + ": entry needs hash and response", ln);
    }
    entries_[j["hash"].get<std::string>()] = j["response"].get<std::string>();
  }
}

std::optional<std::string> TranscriptStore::lookup(const std::string& request_hash) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(request_hash);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranscriptStore::append(const std::string& request_hash, const json& request,
                             const std::string& response) {
  std::lock_guard<std::mutex> lock(mu_);
  if (entries_.count(request_hash)) return;  // idempotent under identical requests
  entries_[request_hash] = response;
  if (path_.empty()) return;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json entry{{"hash", request_hash},
             {"request", request},
             {"response", response},
             {"timestamp_ms",
              std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ValidationError("cannot append to transcript store: " + path_);
  out << entry.dump() << "\n";
}

ChatClient::ChatClient(std::string endpoint_url, ChatMode mode, TranscriptStore* store)
    : url_(std::move(endpoint_url)), mode_(mode), store_(store) {
  if (mode_ != ChatMode::kLive && store_ == nullptr) {
    throw ValidationError("record/replay chat modes need a transcript store");
  }
}

json ChatClient::request_body(const std::vector<ChatMessage>& messages,
                              const ChatParams& params) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back(json{{"content", m.content}, {"role", m.role}});
  return json{{"messages", std::move(msgs)},
              {"model", params.model},
              {"temperature", params.temperature}};
}

std::string ChatClient::request_hash(const std::vector<ChatMessage>& messages,
                                     const ChatParams& params) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return to_hex(fnv1a64(request_body(messages, params).dump()));
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages,
                                 const ChatParams& params) {
  const json body = request_body(messages, params);
  const std::string hash = to_hex(fnv1a64(body.dump()));

  if (mode_ == ChatMode::kReplay) {
    auto hit = store_->lookup(hash);
    if (!hit) throw ReplayMissError(hash);
    return *hit;
  }

  const json res = net::post_json(url_, body);
  if (!res.contains("choices") || !res["choices"].is_array() || res["choices"].empty() ||
      !res["choices"][0].contains("message") ||
      !res["choices"][0]["message"].contains("content") ||
      !res["choices"][0]["message"]["content"].is_string()) {
    throw TransportError("chat response missing choices[0].message.content", false);
  }
  const std::string text = res["choices"][0]["message"]["content"].get<std::string>();
  if (mode_ == ChatMode::kRecord) store_->append(hash, body, text);
  return text;
}

}  // namespace keo
