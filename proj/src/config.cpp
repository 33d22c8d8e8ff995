#include "keo/config.hpp"

#include <cstdlib>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

void RetrievalConfig::validate() const {
  if (k_seeds == 0 || k_chunks == 0) throw ValidationError("config: k values must be >= 1");
  if (chunk_size == 0) throw ValidationError("config: chunk_size must be >= 1");
  if (chunk_overlap >= chunk_size) {
    throw ValidationError("config: chunk_overlap must be < chunk_size");
  }
  if (prompt_budget == 0 || context_budget == 0 || leaf_summary_budget == 0 ||
      parent_summary_budget == 0 || node_hint_budget == 0) {
    throw ValidationError("config: budgets must be >= 1");
  }
  if (leiden_resolution <= 0.0) throw ValidationError("config: leiden_resolution must be > 0");
  if (embed_dim == 0) throw ValidationError("config: embed_dim must be >= 1");
  if (jobs == 0) throw ValidationError("config: jobs must be >= 1");
  if (summarizer != "fallback" && summarizer != "llm") {
    throw ValidationError("config: summarizer must be \"fallback\" or \"llm\"");
  }
  if (embed_provider != "fallback" && embed_provider != "remote") {
    throw ValidationError("config: embed_provider must be \"fallback\" or \"remote\"");
  }
}

json RetrievalConfig::to_json() const {
  return json{{"k_seeds", k_seeds},
              {"k_chunks", k_chunks},
              {"m_hops", m_hops},
              {"chunk_size", chunk_size},
              {"chunk_overlap", chunk_overlap},
              {"prompt_budget", prompt_budget},
              {"leiden_resolution", leiden_resolution},
              {"leaf_summary_budget", leaf_summary_budget},
              {"parent_summary_budget", parent_summary_budget},
              {"context_budget", context_budget},
              {"summarizer", summarizer},
              {"node_hint_budget", node_hint_budget},
              {"embed_provider", embed_provider},
              {"embed_dim", embed_dim},
              {"embed_url", embed_url},
              {"embed_model", embed_model},
              {"chat_url", chat_url},
              {"chat_model", chat_model},
              {"temperature", temperature},
              {"rng_seed", rng_seed},
              {"jobs", jobs}};
}

RetrievalConfig RetrievalConfig::from_json(const json& j) {
  RetrievalConfig cfg;
  const json defaults = cfg.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ValidationError("config: unknown key \"" + key + "\"");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("k_seeds", cfg.k_seeds);
  get("k_chunks", cfg.k_chunks);
  get("m_hops", cfg.m_hops);
  get("chunk_size", cfg.chunk_size);
  get("chunk_overlap", cfg.chunk_overlap);
  get("prompt_budget", cfg.prompt_budget);
  get("leiden_resolution", cfg.leiden_resolution);
  get("leaf_summary_budget", cfg.leaf_summary_budget);
  get("parent_summary_budget", cfg.parent_summary_budget);
  get("context_budget", cfg.context_budget);
  get("summarizer", cfg.summarizer);
  get("node_hint_budget", cfg.node_hint_budget);
  get("embed_provider", cfg.embed_provider);
  get("embed_dim", cfg.embed_dim);
  get("embed_url", cfg.embed_url);
  get("embed_model", cfg.embed_model);
  get("chat_url", cfg.chat_url);
  get("chat_model", cfg.chat_model);
  get("temperature", cfg.temperature);
  get("rng_seed", cfg.rng_seed);
  get("jobs", cfg.jobs);
  cfg.validate();
  return cfg;
}

RetrievalConfig RetrievalConfig::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ParseError("config file must be a flat JSON object: " + path);
  return from_json(j);
}

void RetrievalConfig::apply_env() {
  if (const char* u = std::getenv("KEO_CHAT_URL")) chat_url = u;
  if (const char* u = std::getenv("KEO_EMBED_URL")) embed_url = u;
}

}  // namespace keo
