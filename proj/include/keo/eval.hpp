#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "keo/benchmark.hpp"
#include "keo/chat.hpp"
#include "keo/config.hpp"
#include "keo/rag.hpp"

namespace keo {

// Absolute-scoring criteria per task family, in template order.
const std::array<std::string, 5>& gsm_criteria();
const std::array<std::string, 5>& k2a_criteria();
const std::array<std::string, 5>& criteria_for(QaType t);

struct CriterionScore {
  std::string criterion;
  int score = 0;  // 1..5
  std::string explanation;
};

struct JudgeReport {
  std::string question_id;
  std::string method;  // VN | TC | KG
  std::vector<CriterionScore> scores;
  double computed_overall = 0.0;             // mean of the five criteria
  std::optional<double> stated_overall;      // the judge's own overall line
  bool discrepancy_flagged = false;          // |stated - computed| > 0.5

  double overall() const { return stated_overall ? *stated_overall : computed_overall; }

  nlohmann::json to_json() const;
  static JudgeReport from_json(const nlohmann::json& j);
};

// Absolute-scoring prompt (task-specific criteria and output format). K2A
// items must carry their gold answer.
std::string render_judge_prompt(const QaItem& item, const AnswerRecord& answer);

// Parses the five "Name: <score> - <explanation>" lines (case-insensitive,
// tolerant of brackets and bold markers) plus the optional overall line.
// Throws JudgeParseError (carrying the raw text) rather than returning a
// partial report.
JudgeReport parse_judge_output(const std::string& text, QaType task_type);

struct PairwiseResult {
  std::string question_id;
  std::string method_a;  // presentation slot A
  std::string method_b;
  std::map<std::string, std::string> winners;  // dimension -> method tag or "TIE"
  std::string transcript_id;
  bool flipped = false;  // whether rng flipped the natural order

  nlohmann::json to_json() const;
  static PairwiseResult from_json(const nlohmann::json& j);
};

std::string render_pairwise_prompt(const QaItem& item, const std::string& answer_a,
                                   const std::string& answer_b);

// Pairwise comparison with seed-derived presentation order; winner labels are
// mapped back to method tags before the result is returned.
PairwiseResult judge_pairwise(const QaItem& item, const AnswerRecord& first,
                              const AnswerRecord& second, ChatClient& judge,
                              const RetrievalConfig& cfg, std::uint64_t rng_seed);

struct WinRateCell {
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;

  std::size_t comparisons() const { return wins + losses + ties; }
  double win_rate() const;
  double tie_rate() const;
};

// methods axis {TC, VN, KG}; cells without comparisons stay unset.
struct WinRateMatrix {
  // dimension -> (method a -> (method b -> cell)); includes "Overall".
  std::map<std::string, std::map<std::string, std::map<std::string, WinRateCell>>> cells;

  const WinRateCell* find(const std::string& dimension, const std::string& a,
                          const std::string& b) const;
  nlohmann::json to_json() const;
};

WinRateMatrix win_rate_matrix(const std::vector<PairwiseResult>& results);

}  // namespace keo
