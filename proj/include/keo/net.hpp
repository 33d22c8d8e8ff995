#pragma once

#include <string>

#include <json.hpp>

namespace keo::net {

// Test guard: when set, any attempted HTTP call throws TransportError instead
// of touching the network. Replay-mode runs must pass with this enabled.
void forbid_network(bool forbid);
bool network_forbidden();

struct ParsedUrl {
  std::string scheme;  // http or https
  std::string host;
  int port = 80;
  std::string path;  // leading '/'
};

ParsedUrl parse_url(const std::string& url);

// POST body as application/json, returns the parsed JSON response.
// Throws TransportError: retryable for connection-level failures and 5xx,
// non-retryable for 4xx and malformed response bodies.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         int timeout_seconds = 60);

}  // namespace keo::net
