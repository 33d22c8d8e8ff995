#include "keo/net.hpp"

#include <atomic>
#include <charconv>

#include <httplib.h>

#include "keo/errors.hpp"

namespace keo::net {

namespace {
std::atomic<bool> g_forbid{false};
}

void forbid_network(bool forbid) { g_forbid.store(forbid); }
bool network_forbidden() { return g_forbid.load(); }

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  std::string rest;
  if (url.rfind("http://", 0) == 0) {
    out.scheme = "http";
    out.port = 80;
    rest = url.substr(7);
  } else if (url.rfind("https://", 0) == 0) {
    out.scheme = "https";
    out.port = 443;
    rest = url.substr(8);
  } else {
    throw ValidationError("unsupported URL scheme: " + url);
  }
  const std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    const std::string port_str = authority.substr(colon + 1);
    int port = 0;
    auto [p, ec] = std::from_chars(port_str.data(), port_str.data() + port_str.size(), port);
    if (ec != std::errc() || p != port_str.data() + port_str.size() || port <= 0) {
      throw ValidationError("bad port in URL: " + url);
    }
    out.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw ValidationError("missing host in URL: " + url);
  out.host = authority;
  return out;
}

namespace {

httplib::Result do_post(const ParsedUrl& u, const nlohmann::json& body, int timeout_seconds) {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  if (u.scheme == "https") {
    httplib::SSLClient cli(u.host, u.port);
    cli.set_connection_timeout(timeout_seconds, 0);
    cli.set_read_timeout(timeout_seconds, 0);
    return cli.Post(u.path, body.dump(), "application/json");
  }
#else
  if (u.scheme == "https") {
    throw ValidationError("this build lacks TLS support; use an http:// endpoint");
  }
#endif
  httplib::Client cli(u.host, u.port);
  cli.set_connection_timeout(timeout_seconds, 0);
  cli.set_read_timeout(timeout_seconds, 0);
  return cli.Post(u.path, body.dump(), "application/json");
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         int timeout_seconds) {
  if (network_forbidden()) {
    throw TransportError("network disabled by guard, attempted POST " + url, false);
  }
  const ParsedUrl u = parse_url(url);
  auto res = do_post(u, body, timeout_seconds);
  if (!res) {
    throw TransportError("connection failed: POST " + url + " (" +
                             httplib::to_string(res.error()) + ")",
                         true);
  }
  if (res->status >= 500) {
    throw TransportError("POST " + url + " returned " + std::to_string(res->status), true);
  }
  if (res->status >= 400) {
    throw TransportError("POST " + url + " returned " + std::to_string(res->status) + ": " +
                             res->body,
                         false);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("response is not valid JSON: ") + e.what(), false);
  }
}

}  // namespace keo::net
