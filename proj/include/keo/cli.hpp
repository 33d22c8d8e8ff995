#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "keo/config.hpp"

namespace keo::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitTransport = 3;

struct CommonOpts {
  std::string config_path;                 // --config
  std::string mode = "live";               // --mode live|record|replay
  std::string transcripts;                 // --transcripts (JSONL store)
  std::optional<std::uint64_t> seed;       // --seed
  std::optional<std::size_t> jobs;         // --jobs
};

// Precedence: CLI flags > config file > defaults; KEO_CHAT_URL/KEO_EMBED_URL
// override the endpoints.
RetrievalConfig resolve_config(const CommonOpts& opts);

int cmd_make_fixture(const std::string& out_dir, std::size_t records, std::size_t pairs,
                     std::uint64_t seed);

int cmd_stub_llm(int port);

int cmd_build_kg(const std::string& corpus_path, const std::string& out_dir,
                 const std::vector<std::size_t>& batch_sizes, const CommonOpts& opts);

int cmd_index(const std::string& kg_path, const std::string& corpus_path,
              const std::string& out_dir, const CommonOpts& opts);

int cmd_ask(const std::string& question, const std::string& method, const std::string& kg_path,
            const std::string& index_dir, const std::string& out_dir, const CommonOpts& opts);

int cmd_gen_benchmark(const std::string& corpus_path, const std::string& pairs_path,
                      const std::string& out_dir, std::size_t n_kg, std::size_t gsm_count,
                      std::size_t k2a_count, const std::string& categories_path,
                      const CommonOpts& opts);

int cmd_run_benchmark(const std::string& benchmark_path, const std::string& corpus_path,
                      const std::string& kg_path, const std::string& index_dir,
                      const std::vector<std::string>& methods, const std::string& out_dir,
                      const CommonOpts& opts);

int cmd_judge(const std::string& benchmark_path, const std::string& answers_dir,
              const std::string& out_dir, const CommonOpts& opts);

int cmd_report(const std::string& benchmark_path, const std::string& answers_dir,
               const std::string& judgements_dir, const std::string& out_dir);

}  // namespace keo::cli
