#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "keo/chat.hpp"
#include "keo/config.hpp"
#include "keo/corpus.hpp"
#include "keo/kg.hpp"

namespace keo {

enum class QaType { kGsmComprehensive, kGsmContext, kGsmCategory, kK2a };

std::string qa_type_tag(QaType t);
QaType qa_type_from_tag(const std::string& tag);
bool is_gsm(QaType t);

struct QaItem {
  std::string id;
  QaType qtype = QaType::kGsmComprehensive;
  std::string question;
  std::optional<std::string> gold_answer;  // present iff qtype == K2A
  std::string source;                      // provenance note

  nlohmann::json to_json() const;
  static QaItem from_json(const nlohmann::json& j);
};

// Benchmark file: {"manifest": {"gsm": N, "k2a": M, "total": N+M},
// "items": [...]}. The loader validates item counts against the manifest and
// the gold-answer presence rule.
struct Benchmark {
  std::vector<QaItem> items;

  std::size_t gsm_count() const;
  std::size_t k2a_count() const;

  void save(const std::string& path) const;
  static Benchmark load(const std::string& path);
};

// Deterministic split: n_kg records for KG construction, the rest for
// statistical insight extraction. Original record order is preserved within
// each side.
std::pair<std::vector<Record>, std::vector<Record>> split_corpus(
    const std::vector<Record>& records, std::size_t n_kg, std::uint64_t rng_seed);

struct InsightSummary {
  std::size_t record_count = 0;
  std::vector<std::pair<std::string, std::size_t>> top_terms;   // count desc, term asc
  std::map<std::string, std::size_t> relation_frequency;        // from an optional KG
  std::map<std::string, std::size_t> monthly_counts;            // "YYYY-MM" buckets
  std::string digest;

  nlohmann::json to_json() const;
};

// Term counts (alnum tokenization minus stopwords) and monthly buckets from
// parseable dates; the digest renders the top-20 terms plus the bucket table.
// When a KG is supplied its relation-type frequencies are included.
InsightSummary extract_insights(const std::vector<Record>& records,
                                const KnowledgeGraph* kg = nullptr);

enum class BatchFlag { kOk, kShort, kLong };

struct GsmBatch {
  std::vector<QaItem> items;
  BatchFlag flag = BatchFlag::kOk;
  std::size_t requested = 0;
};

struct GsmCategory {
  std::string name;
  std::string description;
  std::string template_starters;
  std::string context_prompt;
};

// Category definitions live in a data file (JSON array of objects with
// name/description/template_starters/context_prompt).
std::vector<GsmCategory> load_gsm_categories(const std::string& path);

std::string render_gsm_comprehensive_prompt(std::size_t num_questions,
                                            const std::string& data_summary);
std::string render_gsm_context_prompt(std::size_t num_questions,
                                      const std::string& context_type,
                                      const std::string& sample_records);
std::string render_gsm_category_prompt(std::size_t num_questions, const GsmCategory& category);

// Prompts the LLM, splits the reply on newlines, drops blanks. A line-count
// mismatch flags the batch instead of padding or trimming it.
GsmBatch gen_gsm_questions(const std::string& rendered_prompt, QaType subtype, std::size_t n,
                           ChatClient& llm, const RetrievalConfig& cfg,
                           const std::string& id_prefix);

struct ProblemAction {
  std::string problem;
  std::string action;
};

std::vector<ProblemAction> load_problem_actions_jsonl(const std::string& path);

// "What action could be taken when <problem>?" with the action verbatim as
// the gold answer. Items with an empty field are skipped.
std::vector<QaItem> gen_k2a_questions(const std::vector<ProblemAction>& pairs,
                                      const std::string& id_prefix = "k2a");

// Retrievable-corpus leakage guard: returns (record id, item id) pairs where
// a gold answer occurs as a substring of a record (whitespace-insensitive,
// case-insensitive). Non-empty means the corpus must be rejected.
std::vector<std::pair<std::string, std::string>> find_gold_leaks(
    const std::vector<Record>& records, const std::vector<QaItem>& items);

}  // namespace keo
