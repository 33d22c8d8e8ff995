#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace keo {

// Per-command provenance: the effective config, input and artifact checksums,
// and the chat mode. Replay runs pin the timestamp so reruns stay
// byte-identical.
struct RunManifest {
  std::string command;
  std::string mode;  // live | record | replay
  std::string base_dir;  // paths are recorded relative to this, so manifests relocate
  nlohmann::json config;
  std::map<std::string, std::string> inputs;     // relative path -> fnv1a64 hex
  std::map<std::string, std::string> artifacts;  // relative path -> fnv1a64 hex
  nlohmann::json notes;                          // command-specific extras

  void add_input(const std::string& path);
  void add_artifact(const std::string& path);
  // Record/replay runs name the transcript store they wrote or consumed.
  void set_transcripts(const std::string& path);
  void save(const std::string& path) const;

private:
  nlohmann::json transcripts_;
};

}  // namespace keo
