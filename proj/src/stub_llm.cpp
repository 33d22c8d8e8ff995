#include "keo/stub_llm.hpp"

#include <regex>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>

#include "keo/embedding.hpp"
#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo::stub {

using nlohmann::json;

namespace {

std::string last_user_content(const json& request) {
  if (!request.contains("messages") || !request["messages"].is_array()) return "";
  std::string content;
  for (const auto& m : request["messages"]) {
    if (m.value("role", "") == "user") content = m.value("content", "");
  }
  return content;
}

// Rule-based triplet extraction mirroring the fixture grammar.
std::string extract_triplets(const std::string& prompt) {
  const std::string marker = "Target Text: ";
  const std::size_t begin = prompt.rfind(marker);
  if (begin == std::string::npos) return "";
  std::size_t end = prompt.find("\nTriplets:", begin);
  if (end == std::string::npos) end = prompt.size();
  const std::string text = prompt.substr(begin + marker.size(), end - begin - marker.size());

  static const std::vector<std::pair<std::string, std::string>> patterns = {
      {" OCCURRED AT ", "LOCATION"},      {" IS PART OF ", "PART OF"},
      {" MAINTAINED BY ", "MAINTAINED BY"}, {" FOLLOWED BY ", "FOLLOWED BY"},
      {" REPORTED DURING ", "TIME PERIOD"}, {" USED BY ", "USED BY"},
  };

  std::ostringstream out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t dot = text.find('.', start);
    if (dot == std::string::npos) dot = text.size();
    const std::string sentence = trim(text.substr(start, dot - start));
    start = dot + 1;
    if (sentence.empty()) continue;

    const std::size_t caused = sentence.find(" CAUSED ");
    if (caused != std::string::npos) {
      const std::string a = sentence.substr(0, caused);
      const std::string b = sentence.substr(caused + 8);
      out << "<" << b << ", HAS CAUSE, " << a << ">\n";
      out << "<" << a << ", HAS EFFECT, " << b << ">\n";
      continue;
    }
    for (const auto& [needle, relation] : patterns) {
      const std::size_t pos = sentence.find(needle);
      if (pos == std::string::npos) continue;
      out << "<" << sentence.substr(0, pos) << ", " << relation << ", "
          << sentence.substr(pos + needle.size()) << ">\n";
      break;
    }
  }
  // Occasionally emit an off-schema line; the parser is expected to reject it
  // and carry on.
  if (fnv1a64(text) % 5 == 0) out << "<UNSCHEDULED NOTE, RELATES TO, NOTHING>\n";
  return out.str();
}

std::vector<std::string> output_format_labels(const std::string& prompt) {
  std::vector<std::string> labels;
  const std::size_t fmt = prompt.find("Output Format---");
  if (fmt == std::string::npos) return labels;
  std::istringstream in(prompt.substr(fmt));
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos || colon == 0) continue;
    labels.push_back(trim(line.substr(0, colon)));
  }
  return labels;
}

std::string judge_absolute(const std::string& prompt) {
  const auto labels = output_format_labels(prompt);
  if (labels.size() < 6) return "cannot score";
  const std::uint64_t h = fnv1a64(prompt);
  std::ostringstream out;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    const int score = 3 + static_cast<int>((h >> (5 * i)) % 3);
    sum += score;
    out << labels[i] << ": " << score
        << " - grounded in the provided material with adequate depth.\n";
  }
  const double mean = sum / static_cast<double>(labels.size() - 1);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.1f", mean);
  out << labels.back() << ": " << buf << " - consistent quality across criteria.\n";
  return out.str();
}

std::string judge_pairwise_verdict(const std::string& prompt) {
  const auto labels = output_format_labels(prompt);
  std::ostringstream out;
  static const char* verdicts[3] = {"A", "B", "Tie"};
  for (const auto& label : labels) {
    const std::uint64_t h = fnv1a64(prompt + "|" + label);
    out << label << ": " << verdicts[h % 3] << "\n";
  }
  return out.str();
}

std::string generate_questions(const std::string& prompt) {
  std::smatch m;
  std::size_t n = 1;
  static const std::regex re("Generate exactly ([0-9]+) questions");
  if (std::regex_search(prompt, m, re)) n = std::stoul(m[1].str());

  static const std::vector<std::string> topics = {
      "fuel system failures",        "ignition faults",       "hydraulic leaks",
      "landing gear collapses",      "electrical failures",   "carburetor icing events",
      "in-flight vibration reports", "maintenance sign-offs", "seasonal incident clusters",
  };
  static const std::vector<std::string> forms = {
      "What are the recurring patterns connecting %s across the fleet?",
      "How do %s interact with inspection intervals over time?",
      "Which factors most often precede %s, and what do they imply for scheduling?",
      "What systemic gaps do %s reveal in standard operating procedures?",
  };
  const std::uint64_t h = fnv1a64(prompt);
  std::ostringstream out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& topic = topics[(h + i) % topics.size()];
    const std::string& form = forms[(h / 7 + i) % forms.size()];
    char line[256];
    std::snprintf(line, sizeof(line), form.c_str(), topic.c_str());
    out << line << "\n";
  }
  return out.str();
}

std::string answer_question(const std::string& prompt) {
  // Pull the final "Question:" line so the answer tracks the question.
  std::string question;
  const std::size_t q = prompt.rfind("Question: ");
  if (q != std::string::npos) {
    const std::size_t end = prompt.find('\n', q);
    question = prompt.substr(q + 10, end == std::string::npos ? std::string::npos : end - q - 10);
  }
  std::string focus;
  std::istringstream qs(question);
  std::string word;
  int kept = 0;
  while (qs >> word && kept < 8) {
    if (word.size() > 3) {
      if (!focus.empty()) focus += " ";
      focus += word;
      ++kept;
    }
  }
  const std::uint64_t h = fnv1a64(prompt);
  std::ostringstream out;
  out << "Regarding " << (focus.empty() ? "the reported condition" : focus)
      << ": inspect the affected assembly, correct the initiating fault, and verify system "
         "operation before return to service. Recurring cases warrant a fleet-wide check "
         "(ref "
      << to_hex(h).substr(0, 8) << ").";
  return out.str();
}

}  // namespace

std::string stub_chat_response(const json& request) {
  const std::string prompt = last_user_content(request);
  if (prompt.find("extracting knowledge graph triplets") != std::string::npos) {
    return extract_triplets(prompt);
  }
  if (prompt.find("You are comparing two LLM-generated answers") != std::string::npos) {
    return judge_pairwise_verdict(prompt);
  }
  if (prompt.find("You are evaluating") != std::string::npos) {
    return judge_absolute(prompt);
  }
  if (prompt.find("Generate exactly") != std::string::npos) {
    return generate_questions(prompt);
  }
  if (prompt.find("Summarize the following maintenance knowledge") != std::string::npos) {
    const std::size_t colon = prompt.find(":\n");
    std::string material = colon == std::string::npos ? prompt : prompt.substr(colon + 2);
    if (material.size() > 200) material.resize(200);
    return "Summary: " + material;
  }
  return answer_question(prompt);
}

struct StubLlmServer::Impl {
  httplib::Server server;
  int port = 0;
  std::thread thread;
  HashedNgramProvider provider{256, 3};

  explicit Impl(int requested_port) {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        res.status = 400;
        res.set_content(R"({"error":"bad json"})", "application/json");
        return;
      }
      const json out{{"model", body.value("model", "stub")},
                     {"choices", {{{"message", {{"role", "assistant"},
                                                {"content", stub_chat_response(body)}}}}}}};
      res.set_content(out.dump(), "application/json");
    });
    server.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        res.status = 400;
        res.set_content(R"({"error":"bad json"})", "application/json");
        return;
      }
      json data = json::array();
      if (body.contains("input") && body["input"].is_array()) {
        for (const auto& item : body["input"]) {
          data.push_back(json{{"embedding", provider.embed(item.get<std::string>())}});
        }
      }
      res.set_content(json{{"data", std::move(data)}}.dump(), "application/json");
    });

    if (requested_port == 0) {
      port = server.bind_to_any_port("127.0.0.1");
    } else {
      if (!server.bind_to_port("127.0.0.1", requested_port)) {
        throw ValidationError("stub server cannot bind port " + std::to_string(requested_port));
      }
      port = requested_port;
    }
  }
};

StubLlmServer::StubLlmServer(int port) : impl_(std::make_unique<Impl>(port)) {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubLlmServer::~StubLlmServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int StubLlmServer::port() const { return impl_->port; }

std::string StubLlmServer::chat_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1/chat/completions";
}

std::string StubLlmServer::embed_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1/embeddings";
}

void StubLlmServer::serve_forever() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace keo::stub
