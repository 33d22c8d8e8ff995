#include "keo/manifest.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>

#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

namespace {

std::string iso_timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string relativize(const std::string& path, const std::string& base) {
  if (base.empty()) return path;
  std::error_code ec;
  const auto rel = std::filesystem::relative(path, base, ec);
  if (ec || rel.empty()) return path;
  return rel.string();
}

}  // namespace

void RunManifest::add_input(const std::string& path) {
  inputs[relativize(path, base_dir)] = to_hex(fnv1a64_file(path));
}

void RunManifest::add_artifact(const std::string& path) {
  artifacts[relativize(path, base_dir)] = to_hex(fnv1a64_file(path));
}

void RunManifest::set_transcripts(const std::string& path) {
  if (path.empty()) return;
  transcripts_ = json{{"path", relativize(path, base_dir)},
                      {"checksum", to_hex(fnv1a64_file(path))}};
}

void RunManifest::save(const std::string& path) const {
  // Replay consumes no external events, so its manifests carry a fixed
  // timestamp and rerun byte-identically.
  const std::string timestamp =
      mode == "replay" ? "1970-01-01T00:00:00Z" : iso_timestamp_now();
  json j{{"command", command}, {"mode", mode},       {"config", config},
         {"inputs", inputs},   {"artifacts", artifacts}, {"timestamp", timestamp}};
  if (!transcripts_.is_null()) j["transcripts"] = transcripts_;
  if (!notes.is_null()) j["notes"] = notes;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace keo
