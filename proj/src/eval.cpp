#include "keo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

const std::array<std::string, 5>& gsm_criteria() {
  static const std::array<std::string, 5> c = {"Global Perspective", "Theme Identification",
                                               "Synthesis Quality", "Strategic Value",
                                               "Pattern Recognition"};
  return c;
}

const std::array<std::string, 5>& k2a_criteria() {
  static const std::array<std::string, 5> c = {"Correctness", "Completeness", "Practicality",
                                               "Safety", "Clarity"};
  return c;
}

const std::array<std::string, 5>& criteria_for(QaType t) {
  return is_gsm(t) ? gsm_criteria() : k2a_criteria();
}

json JudgeReport::to_json() const {
  json score_list = json::array();
  for (const auto& s : scores) {
    score_list.push_back(json{{"criterion", s.criterion},
                              {"score", s.score},
                              {"explanation", s.explanation}});
  }
  json j{{"question_id", question_id},
         {"method", method},
         {"scores", std::move(score_list)},
         {"computed_overall", computed_overall},
         {"discrepancy_flagged", discrepancy_flagged}};
  if (stated_overall) j["stated_overall"] = *stated_overall;
  return j;
}

JudgeReport JudgeReport::from_json(const json& j) {
  JudgeReport r;
  r.question_id = j.at("question_id").get<std::string>();
  r.method = j.at("method").get<std::string>();
  for (const auto& sj : j.at("scores")) {
    r.scores.push_back(CriterionScore{sj.at("criterion").get<std::string>(),
                                      sj.at("score").get<int>(),
                                      sj.value("explanation", "")});
  }
  r.computed_overall = j.at("computed_overall").get<double>();
  r.discrepancy_flagged = j.value("discrepancy_flagged", false);
  if (j.contains("stated_overall")) r.stated_overall = j["stated_overall"].get<double>();
  return r;
}

std::string render_judge_prompt(const QaItem& item, const AnswerRecord& answer) {
  if (item.qtype == QaType::kK2a && (!item.gold_answer || item.gold_answer->empty())) {
    throw ValidationError("render_judge_prompt: K2A item " + item.id + " has no gold answer");
  }
  std::ostringstream p;
  if (is_gsm(item.qtype)) {
    p << "Role---\n"
         "You are evaluating an LLM-generated answer to a global sensemaking question in the "
         "domain of aviation maintenance.\n\n"
         "Input---\n"
         "Question: "
      << item.question
      << "\n"
         "LLM Answer: "
      << answer.answer
      << "\n\n"
         "Definition---\n"
         "Global sensemaking questions require synthesis across entire datasets to identify "
         "overarching themes, systemic patterns, and strategic insights.\n\n"
         "Evaluation Criteria---\n"
         "Rate the answer on a 1-5 scale for each of the following:\n"
         "Global Perspective: Does the answer demonstrate understanding of dataset-wide "
         "patterns?\n"
         "Theme Identification: Are major themes and patterns clearly identified?\n"
         "Synthesis Quality: How well does it synthesize information across multiple "
         "sources?\n"
         "Strategic Value: Does it provide insights useful for high-level decision making?\n"
         "Pattern Recognition: Are complex relationships and dependencies identified?\n\n"
         "Output Format---\n"
         "Global Perspective: [score] - [explanation]\n"
         "Theme Identification: [score] - [explanation]\n"
         "Synthesis Quality: [score] - [explanation]\n"
         "Strategic Value: [score] - [explanation]\n"
         "Pattern Recognition: [score] - [explanation]\n"
         "Global Sensemaking Assessment: [overall score]\n";
  } else {
    p << "Role---\n"
         "You are evaluating a predicted answer to a maintenance-action question, assessing "
         "its correctness and safety based on the gold-standard response.\n\n"
         "Input---\n"
         "Question: "
      << item.question
      << "\n"
         "Ground Truth Answer: "
      << *item.gold_answer
      << "\n"
         "Predicted Answer: "
      << answer.answer
      << "\n\n"
         "Evaluation Criteria---\n"
         "Rate on a 1-5 scale:\n"
         "Correctness: How factually accurate is the predicted answer?\n"
         "Completeness: Does it cover all necessary action steps?\n"
         "Practicality: Are the actions feasible and implementable?\n"
         "Safety: Would the actions maintain or improve operational safety?\n"
         "Clarity: Is the answer easy to understand and follow?\n\n"
         "Output Format---\n"
         "Correctness: [score] - [explanation]\n"
         "Completeness: [score] - [explanation]\n"
         "Practicality: [score] - [explanation]\n"
         "Safety: [score] - [explanation]\n"
         "Clarity: [score] - [explanation]\n"
         "Overall Score: [average score] - [summary of quality]\n";
  }
  return p.str();
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Strips leading separator noise ("- ", ": ", "*", en/em dashes) from an
// explanation remainder.
std::string clean_remainder(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '-' || c == ':' || c == '*' || c == ']') {
      ++i;
      continue;
    }
    // UTF-8 en dash (e2 80 93) and em dash (e2 80 94)
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(s[i + 2]) == 0x93 ||
         static_cast<unsigned char>(s[i + 2]) == 0x94)) {
      i += 3;
      continue;
    }
    break;
  }
  return trim(s.substr(i));
}

std::regex label_value_regex(const std::string& label) {
  // Tolerates list markers, bold asterisks, bracketed values.
  return std::regex("^[\\s*#>-]*" + label + "\\s*\\**\\s*:\\s*\\**\\s*\\[?\\s*([0-9]+(?:\\.[0-9]+)?)",
                    std::regex::icase);
}

struct LabelMatch {
  double value = 0.0;
  std::string remainder;
};

std::optional<LabelMatch> find_label_value(const std::vector<std::string>& lines,
                                           const std::string& label) {
  const std::regex re = label_value_regex(label);
  for (const auto& line : lines) {
    std::smatch m;
    if (std::regex_search(line, m, re)) {
      LabelMatch out;
      out.value = std::stod(m[1].str());
      out.remainder = clean_remainder(line.substr(static_cast<std::size_t>(m.position(0)) +
                                                  static_cast<std::size_t>(m.length(0))));
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

JudgeReport parse_judge_output(const std::string& text, QaType task_type) {
  const auto lines = split_lines(text);
  JudgeReport report;

  double sum = 0.0;
  for (const auto& criterion : criteria_for(task_type)) {
    const auto m = find_label_value(lines, criterion);
    if (!m) {
      throw JudgeParseError("missing criterion line \"" + criterion + "\"", text);
    }
    const double v = m->value;
    if (v != std::floor(v)) {
      throw JudgeParseError("criterion \"" + criterion + "\" score is not an integer", text);
    }
    const int score = static_cast<int>(v);
    if (score < 1 || score > 5) {
      throw JudgeParseError("criterion \"" + criterion + "\" score " + std::to_string(score) +
                                " out of range 1-5",
                            text);
    }
    report.scores.push_back(CriterionScore{criterion, score, m->remainder});
    sum += score;
  }
  report.computed_overall = sum / 5.0;

  for (const std::string& label :
       {std::string("Global Sensemaking Assessment"), std::string("Overall Score"),
        std::string("Overall Assessment"), std::string("Overall")}) {
    if (const auto m = find_label_value(lines, label)) {
      if (m->value < 1.0 || m->value > 5.0) {
        throw JudgeParseError("overall score " + std::to_string(m->value) +
                                  " out of range 1-5",
                              text);
      }
      report.stated_overall = m->value;
      break;
    }
  }
  if (report.stated_overall &&
      std::abs(*report.stated_overall - report.computed_overall) > 0.5) {
    report.discrepancy_flagged = true;
  }
  return report;
}

json PairwiseResult::to_json() const {
  return json{{"question_id", question_id}, {"method_a", method_a}, {"method_b", method_b},
              {"winners", winners},         {"transcript_id", transcript_id},
              {"flipped", flipped}};
}

PairwiseResult PairwiseResult::from_json(const json& j) {
  PairwiseResult r;
  r.question_id = j.at("question_id").get<std::string>();
  r.method_a = j.at("method_a").get<std::string>();
  r.method_b = j.at("method_b").get<std::string>();
  r.winners = j.at("winners").get<std::map<std::string, std::string>>();
  r.transcript_id = j.value("transcript_id", "");
  r.flipped = j.value("flipped", false);
  return r;
}

std::string render_pairwise_prompt(const QaItem& item, const std::string& answer_a,
                                   const std::string& answer_b) {
  const auto& criteria = criteria_for(item.qtype);
  std::ostringstream p;
  p << "Role---\n"
       "You are comparing two LLM-generated answers (Answer A and Answer B) to the same "
       "question in the domain of aviation maintenance.\n\n"
       "Input---\n"
       "Question: "
    << item.question << "\n";
  if (item.qtype == QaType::kK2a && item.gold_answer) {
    p << "Ground Truth Answer: " << *item.gold_answer << "\n";
  }
  p << "Answer A: " << answer_a
    << "\n"
       "Answer B: "
    << answer_b
    << "\n\n"
       "Evaluation Criteria---\n"
       "For each criterion, state which answer is better, or Tie:\n";
  for (const auto& c : criteria) p << c << "\n";
  p << "\n"
       "Output Format---\n";
  for (const auto& c : criteria) p << c << ": [A|B|Tie]\n";
  p << "Overall: [A|B|Tie]\n";
  return p.str();
}

namespace {

std::optional<std::string> find_verdict(const std::vector<std::string>& lines,
                                        const std::string& label) {
  const std::regex re("^[\\s*#>-]*" + label + "\\s*\\**\\s*:\\s*\\**\\s*\\[?\\s*(A|B|TIE)\\b",
                      std::regex::icase);
  for (const auto& line : lines) {
    std::smatch m;
    if (std::regex_search(line, m, re)) {
      std::string v = m[1].str();
      for (char& c : v) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return v;
    }
  }
  return std::nullopt;
}

}  // namespace

PairwiseResult judge_pairwise(const QaItem& item, const AnswerRecord& first,
                              const AnswerRecord& second, ChatClient& judge,
                              const RetrievalConfig& cfg, std::uint64_t rng_seed) {
  if (first.question_id != second.question_id || first.question_id != item.id) {
    throw ValidationError("judge_pairwise: answers must address the same question");
  }
  const std::string tag_first = method_tag(first.method);
  const std::string tag_second = method_tag(second.method);

  // Seed-derived presentation order counters position bias; flipping the seed
  // parity flips the order while attribution stays with the methods.
  const std::uint64_t h = fnv1a64(item.id + "|" + tag_first + "|" + tag_second);
  const bool flip = ((h ^ rng_seed) & 1) != 0;
  const AnswerRecord& slot_a = flip ? second : first;
  const AnswerRecord& slot_b = flip ? first : second;

  const std::string prompt = render_pairwise_prompt(item, slot_a.answer, slot_b.answer);
  const std::vector<ChatMessage> messages{{"user", prompt}};
  const ChatParams params{cfg.chat_model, cfg.temperature};

  PairwiseResult result;
  result.question_id = item.id;
  result.method_a = method_tag(slot_a.method);
  result.method_b = method_tag(slot_b.method);
  result.transcript_id = ChatClient::request_hash(messages, params);
  result.flipped = flip;

  const std::string response = judge.complete(messages, params);
  const auto lines = split_lines(response);

  std::vector<std::string> dimensions(criteria_for(item.qtype).begin(),
                                      criteria_for(item.qtype).end());
  dimensions.push_back("Overall");
  for (const auto& dim : dimensions) {
    const auto v = find_verdict(lines, dim);
    if (!v) {
      throw JudgeParseError("pairwise verdict missing dimension \"" + dim +
                                "\" (transcript " + result.transcript_id + ")",
                            response);
    }
    if (*v == "A") {
      result.winners[dim] = result.method_a;
    } else if (*v == "B") {
      result.winners[dim] = result.method_b;
    } else {
      result.winners[dim] = "TIE";
    }
  }
  return result;
}

double WinRateCell::win_rate() const {
  return comparisons() == 0 ? 0.0
                            : static_cast<double>(wins) / static_cast<double>(comparisons());
}

double WinRateCell::tie_rate() const {
  return comparisons() == 0 ? 0.0
                            : static_cast<double>(ties) / static_cast<double>(comparisons());
}

const WinRateCell* WinRateMatrix::find(const std::string& dimension, const std::string& a,
                                       const std::string& b) const {
  auto d = cells.find(dimension);
  if (d == cells.end()) return nullptr;
  auto ra = d->second.find(a);
  if (ra == d->second.end()) return nullptr;
  auto rb = ra->second.find(b);
  if (rb == ra->second.end()) return nullptr;
  return &rb->second;
}

json WinRateMatrix::to_json() const {
  json out = json::object();
  for (const auto& [dim, rows] : cells) {
    json dim_json = json::object();
    for (const auto& [a, row] : rows) {
      json row_json = json::object();
      for (const auto& [b, cell] : row) {
        row_json[b] = json{{"wins", cell.wins},
                           {"losses", cell.losses},
                           {"ties", cell.ties},
                           {"win_rate", cell.win_rate()},
                           {"tie_rate", cell.tie_rate()}};
      }
      dim_json[a] = std::move(row_json);
    }
    out[dim] = std::move(dim_json);
  }
  return out;
}

WinRateMatrix win_rate_matrix(const std::vector<PairwiseResult>& results) {
  WinRateMatrix m;
  for (const auto& r : results) {
    for (const auto& [dim, winner] : r.winners) {
      WinRateCell& ab = m.cells[dim][r.method_a][r.method_b];
      WinRateCell& ba = m.cells[dim][r.method_b][r.method_a];
      if (winner == "TIE") {
        ab.ties += 1;
        ba.ties += 1;
      } else if (winner == r.method_a) {
        ab.wins += 1;
        ba.losses += 1;
      } else if (winner == r.method_b) {
        ba.wins += 1;
        ab.losses += 1;
      } else {
        throw ValidationError("win_rate_matrix: winner \"" + winner +
                              "\" is not a method of the pair");
      }
    }
  }
  return m;
}

}  // namespace keo
