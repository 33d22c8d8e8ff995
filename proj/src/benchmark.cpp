#include "keo/benchmark.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

std::string qa_type_tag(QaType t) {
  switch (t) {
    case QaType::kGsmComprehensive: return "GSM_COMPREHENSIVE";
    case QaType::kGsmContext: return "GSM_CONTEXT";
    case QaType::kGsmCategory: return "GSM_CATEGORY";
    case QaType::kK2a: return "K2A";
  }
  return "?";
}

QaType qa_type_from_tag(const std::string& tag) {
  if (tag == "GSM_COMPREHENSIVE") return QaType::kGsmComprehensive;
  if (tag == "GSM_CONTEXT") return QaType::kGsmContext;
  if (tag == "GSM_CATEGORY") return QaType::kGsmCategory;
  if (tag == "K2A") return QaType::kK2a;
  throw ParseError("unknown question type tag \"" + tag + "\"");
}

bool is_gsm(QaType t) { return t != QaType::kK2a; }

json QaItem::to_json() const {
  json j{{"id", id}, {"qtype", qa_type_tag(qtype)}, {"question", question}, {"source", source}};
  if (gold_answer) j["gold_answer"] = *gold_answer;
  return j;
}

QaItem QaItem::from_json(const json& j) {
  QaItem item;
  item.id = j.at("id").get<std::string>();
  item.qtype = qa_type_from_tag(j.at("qtype").get<std::string>());
  item.question = j.at("question").get<std::string>();
  item.source = j.value("source", "");
  if (j.contains("gold_answer")) item.gold_answer = j["gold_answer"].get<std::string>();
  if (item.qtype == QaType::kK2a && (!item.gold_answer || item.gold_answer->empty())) {
    throw ParseError("K2A item " + item.id + " is missing its gold answer");
  }
  if (item.qtype != QaType::kK2a && item.gold_answer) {
    throw ParseError("GSM item " + item.id + " must not carry a gold answer");
  }
  return item;
}

std::size_t Benchmark::gsm_count() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const QaItem& i) { return is_gsm(i.qtype); }));
}

std::size_t Benchmark::k2a_count() const { return items.size() - gsm_count(); }

void Benchmark::save(const std::string& path) const {
  json item_array = json::array();
  std::map<std::string, std::size_t> by_qtype;
  for (const auto& i : items) {
    item_array.push_back(i.to_json());
    by_qtype[qa_type_tag(i.qtype)] += 1;
  }
  // gsm/k2a totals are the validated counts; the per-qtype breakdown is
  // informational (GSM subtype proportions are unconstrained).
  json j{{"manifest",
          {{"gsm", gsm_count()},
           {"k2a", k2a_count()},
           {"total", items.size()},
           {"by_qtype", by_qtype}}},
         {"items", std::move(item_array)}};
  write_file(path, j.dump(2) + "\n");
}

Benchmark Benchmark::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("benchmark file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.contains("manifest") || !j.contains("items") || !j["items"].is_array()) {
    throw ParseError("benchmark file needs \"manifest\" and \"items\": " + path);
  }
  Benchmark b;
  std::set<std::string> seen_ids;
  for (const auto& ij : j["items"]) {
    QaItem item = QaItem::from_json(ij);
    if (!seen_ids.insert(item.id).second) {
      throw ParseError("duplicate benchmark item id \"" + item.id + "\"");
    }
    b.items.push_back(std::move(item));
  }
  const auto& m = j["manifest"];
  const auto declared_gsm = m.value("gsm", std::size_t{0});
  const auto declared_k2a = m.value("k2a", std::size_t{0});
  if (declared_gsm != b.gsm_count() || declared_k2a != b.k2a_count()) {
    std::ostringstream msg;
    msg << "benchmark manifest mismatch: declares gsm=" << declared_gsm
        << " k2a=" << declared_k2a << ", file contains gsm=" << b.gsm_count()
        << " k2a=" << b.k2a_count();
    throw ValidationError(msg.str());
  }
  if (m.contains("total") && m["total"].get<std::size_t>() != b.items.size()) {
    throw ValidationError("benchmark manifest total does not match item count");
  }
  return b;
}

std::pair<std::vector<Record>, std::vector<Record>> split_corpus(
    const std::vector<Record>& records, std::size_t n_kg, std::uint64_t rng_seed) {
  if (n_kg > records.size()) {
    throw ValidationError("split_corpus: n_kg " + std::to_string(n_kg) + " exceeds corpus size " +
                          std::to_string(records.size()));
  }
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(idx);
  std::vector<char> in_kg(records.size(), 0);
  for (std::size_t i = 0; i < n_kg; ++i) in_kg[idx[i]] = 1;

  std::pair<std::vector<Record>, std::vector<Record>> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_kg[i] ? out.first : out.second).push_back(records[i]);
  }
  return out;
}

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",    "an",  "and",  "are", "as",   "at",  "be",   "by",   "for",  "from",
      "had",  "has", "have", "in",  "into", "is",  "it",   "its",  "no",   "not",
      "of",   "on",  "or",   "the", "then", "to",  "was",  "were", "when", "with",
      "during", "after", "before",
  };
  return words;
}

std::optional<std::string> month_bucket(const std::string& date) {
  // Accepts YYYY-MM... or YYYY/MM...; anything else is unbucketed.
  if (date.size() < 7) return std::nullopt;
  for (int i : {0, 1, 2, 3}) {
    if (!std::isdigit(static_cast<unsigned char>(date[static_cast<std::size_t>(i)]))) {
      return std::nullopt;
    }
  }
  if (date[4] != '-' && date[4] != '/') return std::nullopt;
  if (!std::isdigit(static_cast<unsigned char>(date[5])) ||
      !std::isdigit(static_cast<unsigned char>(date[6]))) {
    return std::nullopt;
  }
  return date.substr(0, 4) + "-" + date.substr(5, 2);
}

}  // namespace

InsightSummary extract_insights(const std::vector<Record>& records, const KnowledgeGraph* kg) {
  InsightSummary s;
  s.record_count = records.size();

  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) {
    for (const auto& tok : tokenize_alnum(r.text)) {
      if (stopwords().count(tok)) continue;
      counts[tok] += 1;
    }
    if (r.date) {
      if (auto bucket = month_bucket(*r.date)) s.monthly_counts[*bucket] += 1;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> terms(counts.begin(), counts.end());
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  s.top_terms = std::move(terms);

  if (kg) {
    for (const auto& [key, w] : kg->edges()) {
      s.relation_frequency[std::string(relation_label(key.relation))] += w;
    }
  }

  if (s.record_count > 0) {
    std::ostringstream d;
    d << "Dataset of " << s.record_count << " aviation maintenance records.\n";
    d << "Most frequent terms:";
    const std::size_t n = std::min<std::size_t>(20, s.top_terms.size());
    for (std::size_t i = 0; i < n; ++i) {
      d << (i ? ", " : " ") << s.top_terms[i].first << " (" << s.top_terms[i].second << ")";
    }
    d << "\n";
    if (!s.monthly_counts.empty()) {
      d << "Records per month:";
      bool first = true;
      for (const auto& [month, c] : s.monthly_counts) {
        d << (first ? " " : ", ") << month << ": " << c;
        first = false;
      }
      d << "\n";
    }
    if (!s.relation_frequency.empty()) {
      d << "Relation frequencies:";
      bool first = true;
      for (const auto& [rel, c] : s.relation_frequency) {
        d << (first ? " " : ", ") << rel << ": " << c;
        first = false;
      }
      d << "\n";
    }
    s.digest = d.str();
  }
  return s;
}

json InsightSummary::to_json() const {
  json terms = json::array();
  for (const auto& [t, c] : top_terms) terms.push_back(json{{"term", t}, {"count", c}});
  return json{{"record_count", record_count},
              {"top_terms", std::move(terms)},
              {"relation_frequency", relation_frequency},
              {"monthly_counts", monthly_counts},
              {"digest", digest}};
}

std::vector<GsmCategory> load_gsm_categories(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("category file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_array()) throw ParseError("category file must be a JSON array: " + path);
  std::vector<GsmCategory> out;
  for (const auto& cj : j) {
    GsmCategory c;
    c.name = cj.at("name").get<std::string>();
    c.description = cj.at("description").get<std::string>();
    c.template_starters = cj.at("template_starters").get<std::string>();
    c.context_prompt = cj.value("context_prompt", "");
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

const char* kGsmStyleFooter =
    "Each question should appear on a new line, with no numbering or bullets.";

}  // namespace

std::string render_gsm_comprehensive_prompt(std::size_t num_questions,
                                            const std::string& data_summary) {
  std::ostringstream p;
  p << "Role---\n"
       "You are an expert in aviation safety and maintenance analysis.\n\n"
       "Task---\n"
       "Generate high-level, global sensemaking questions based on a summary of an aviation "
       "maintenance dataset. These questions should require a comprehensive understanding of "
       "patterns and relationships that span the entire dataset.\n\n"
       "Goal---\n"
       "Generate exactly "
    << num_questions
    << " questions that encourage holistic insight into overarching themes, systemic issues, "
       "and strategic implications present in the dataset. The dataset summary is provided "
       "below: "
    << data_summary
    << "\n\n"
       "Guidelines---\n"
       "The questions must: (1) require a holistic understanding of the dataset, not just "
       "individual records; (2) focus on patterns, trends, causal relationships, and systemic "
       "insights; (3) enable strategic reasoning or decision-making at an organizational "
       "level; and (4) avoid questions that can be answered through simple statistics or "
       "localized analysis.\n\n"
       "Style---\n"
       "Generate exactly "
    << num_questions << " questions. " << kGsmStyleFooter
    << " Use formulations such as: \"What are the...\", \"How do...\", \"Which factors...\", "
       "\"What patterns...\".\n";
  return p.str();
}

std::string render_gsm_context_prompt(std::size_t num_questions, const std::string& context_type,
                                      const std::string& sample_records) {
  std::ostringstream p;
  p << "Role---\n"
       "You are an expert in aviation safety and maintenance analysis.\n\n"
       "Task---\n"
       "Generate context-specific sensemaking questions based on representative aviation "
       "maintenance records. These questions should help uncover causes, patterns, and "
       "interactions relevant to the particular maintenance context.\n\n"
       "Goal---\n"
       "Given representative maintenance records from the "
    << context_type << " context: " << sample_records << ", generate exactly " << num_questions
    << " questions that promote analysis across multiple records and inform actionable "
       "understanding.\n\n"
       "Guidelines---\n"
       "The questions should: (1) Focus on understanding why failures occur. (2) Identify "
       "what can be done to prevent similar issues. (3) Explore how different factors "
       "interact. (4) Reveal patterns across similar incidents. (5) Support decision-making "
       "for maintenance and safety.\n\n"
       "Style---\n"
       "Generate exactly "
    << num_questions << " questions. " << kGsmStyleFooter
    << " Focus on questions that require synthesis of multiple incidents or factors, rather "
       "than simple summaries or isolated examples.\n";
  return p.str();
}

std::string render_gsm_category_prompt(std::size_t num_questions, const GsmCategory& category) {
  std::ostringstream p;
  p << "Role---\n"
       "You are an expert in aviation safety and maintenance analysis.\n\n"
       "Task---\n"
       "Generate high-quality sensemaking questions tailored to a specific analytical "
       "category in aviation maintenance.\n\n"
       "Goal---\n"
       "Generate exactly "
    << num_questions << " questions that align with the category: " << category.name
    << ". These questions should reflect deep insight into aviation maintenance practices "
       "and support strategic reasoning.\n\n"
       "Category---\n"
    << category.description
    << "\n\n"
       "Context---\n"
    << category.context_prompt
    << "\n\n"
       "Guidelines---\n"
       "The questions should: (1) Require synthesis across multiple data points to answer. "
       "(2) Focus on actionable insights for aviation safety. (3) Be specific to the "
       "aviation maintenance domain. (4) Support strategic decision-making. (5) Reveal "
       "patterns and relationships in the data.\n\n"
       "Style---\n"
       "Use the following starter patterns as inspiration, but generate varied, comprehensive "
       "questions: "
    << category.template_starters << "\nGenerate exactly " << num_questions << " questions. "
    << kGsmStyleFooter << "\n";
  return p.str();
}

GsmBatch gen_gsm_questions(const std::string& rendered_prompt, QaType subtype, std::size_t n,
                           ChatClient& llm, const RetrievalConfig& cfg,
                           const std::string& id_prefix) {
  if (n == 0) throw ValidationError("gen_gsm_questions: n must be >= 1");
  if (!is_gsm(subtype)) throw ValidationError("gen_gsm_questions: subtype must be a GSM type");

  const std::vector<ChatMessage> messages{{"user", rendered_prompt}};
  const std::string response = llm.complete(messages, {cfg.chat_model, cfg.temperature});

  GsmBatch batch;
  batch.requested = n;
  std::istringstream in(response);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const std::string q = trim(line);
    if (q.empty()) continue;
    QaItem item;
    item.id = id_prefix + "-" + std::to_string(i++);
    item.qtype = subtype;
    item.question = q;
    item.source = "generated:" + qa_type_tag(subtype);
    batch.items.push_back(std::move(item));
  }
  if (batch.items.size() < n) {
    batch.flag = BatchFlag::kShort;
  } else if (batch.items.size() > n) {
    batch.flag = BatchFlag::kLong;
  }
  return batch;
}

std::vector<ProblemAction> load_problem_actions_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem-action file: " + path);
  std::vector<ProblemAction> out;
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("problem-action line is not valid JSON: ") + e.what(), ln);
    }
    if (!j.contains("problem") || !j.contains("action")) {
      throw ParseError("problem-action record needs \"problem\" and \"action\"", ln);
    }
    out.push_back(ProblemAction{j["problem"].get<std::string>(),
                                j["action"].get<std::string>()});
  }
  return out;
}

std::vector<QaItem> gen_k2a_questions(const std::vector<ProblemAction>& pairs,
                                      const std::string& id_prefix) {
  std::vector<QaItem> out;
  std::size_t i = 0;
  for (const auto& pa : pairs) {
    const std::string problem = trim(pa.problem);
    const std::string action = trim(pa.action);
    if (problem.empty() || action.empty()) {
      ++i;  // keep ids stable for the surviving items
      continue;
    }
    // Trailing sentence punctuation in the problem folds into the question mark.
    std::string body = problem;
    while (!body.empty() && (body.back() == '.' || body.back() == '?' || body.back() == '!')) {
      body.pop_back();
    }
    QaItem item;
    item.id = id_prefix + "-" + std::to_string(i++);
    item.qtype = QaType::kK2a;
    item.question = "What action could be taken when " + body + "?";
    item.gold_answer = action;
    item.source = "problem-action pair";
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> find_gold_leaks(
    const std::vector<Record>& records, const std::vector<QaItem>& items) {
  // Whitespace-collapsed, case-folded matching so cosmetic differences do not
  // defeat the guard.
  std::vector<std::pair<std::string, std::string>> leaks;
  std::vector<std::pair<std::string, std::string>> norm_records;
  norm_records.reserve(records.size());
  for (const auto& r : records) norm_records.emplace_back(r.id, canonicalize(r.text));
  for (const auto& item : items) {
    if (!item.gold_answer) continue;
    const std::string gold = canonicalize(*item.gold_answer);
    if (gold.empty()) continue;
    for (const auto& [rid, text] : norm_records) {
      if (text.find(gold) != std::string::npos) leaks.emplace_back(rid, item.id);
    }
  }
  return leaks;
}

}  // namespace keo
