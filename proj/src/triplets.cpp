#include "keo/triplets.hpp"

#include <sstream>

#include "keo/util.hpp"

namespace keo {

namespace {

// Splits "E1, REL, E2" into exactly three comma-separated fields. Entity
// mentions in this domain do not contain commas; a different field count is
// a malformed line.
std::vector<std::string> split_commas(std::string_view body) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = body.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(body.substr(start)));
      break;
    }
    fields.push_back(trim(body.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

ParsedTriplets parse_triplets(std::string_view text, ParseMode mode,
                              const std::set<std::string>& known_nodes) {
  ParsedTriplets out;
  long line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (end == text.size() && raw.empty()) break;
    if (is_blank(raw)) continue;

    const std::string line = trim(raw);
    auto reject = [&](std::string reason) {
      out.rejected.push_back(RejectedLine{line_no, line, std::move(reason)});
    };

    if (line.front() != '<' || line.back() != '>') {
      reject("not wrapped in <...>");
      continue;
    }
    const auto fields = split_commas(std::string_view(line).substr(1, line.size() - 2));
    if (fields.size() != 3) {
      reject("expected 3 comma-separated fields, got " + std::to_string(fields.size()));
      continue;
    }
    const std::string head = canonicalize(fields[0]);
    const std::string tail = canonicalize(fields[2]);
    if (head.empty() || tail.empty()) {
      reject("empty entity mention");
      continue;
    }
    const auto rel = relation_from_label(fields[1]);
    if (!rel) {
      reject("unknown relation \"" + fields[1] + "\"");
      continue;
    }
    if (mode == ParseMode::kStrict) {
      if (!known_nodes.count(head)) {
        reject("strict mode: head \"" + head + "\" is not an existing node");
        continue;
      }
      if (!known_nodes.count(tail)) {
        reject("strict mode: tail \"" + tail + "\" is not an existing node");
        continue;
      }
    }
    out.accepted.push_back(Triplet{head, *rel, tail});
  }
  return out;
}

std::string render_kg_prompt(std::string_view record_text,
                             const std::vector<std::string>& current_nodes,
                             std::size_t hint_budget) {
  std::string node_hint;
  if (current_nodes.empty()) {
    node_hint = "Existing nodes in the knowledge graph: (none yet).";
  } else {
    node_hint = "Existing nodes in the knowledge graph: ";
    const std::size_t n = std::min(hint_budget, current_nodes.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i) node_hint += "; ";
      node_hint += current_nodes[i];
    }
    node_hint += ".";
  }

  std::ostringstream p;
  p << "Role---\n"
       "You are extracting knowledge graph triplets from aviation maintenance text.\n"
       "\n"
       "Task---\n"
       "Extract informative triplets directly from the text following the examples. "
       "Format each triplet as: <entity1, relation, entity2>. Do not add any extra words, "
       "line breaks, or explanatory notes. Focus on extracting factual relationships from "
       "the text.\n"
       "\n"
       "Goal---\n"
       "Generate structured entity-relation-entity triplets that capture factual "
       "relationships from aviation maintenance records while maintaining consistency "
       "across the knowledge graph.\n"
       "\n"
       "Guidelines---\n"
       "Use only these relation types: "
    << relation_label_list()
    << ". When extracting triplets, prefer to use existing nodes from the knowledge graph "
       "if possible, rather than inventing new entity mentions.\n"
    << node_hint
    << "\n"
       "\n"
       "Style---\n"
       "Extract triplets in the format <entity1, relation, entity2>. Each triplet should "
       "appear on a new line with no numbering or bullets. Focus on factual relationships "
       "that can be directly inferred from the text.\n"
       "\n"
       "Example---\n"
       "TEXT: THE WRIGHT BROTHERS DESIGNED THE FIRST SUCCESSFUL AIRPLANE IN 1903 IN KITTY "
       "HAWK.\n"
       "Triplets:\n"
       "<FIRST SUCCESSFUL AIRPLANE, DESIGNED BY, WRIGHT BROTHERS>\n"
       "<FIRST SUCCESSFUL AIRPLANE, TIME PERIOD, 1903>\n"
       "<FIRST SUCCESSFUL AIRPLANE, LOCATION, KITTY HAWK>\n"
       "\n"
       "Target Text: "
    << record_text
    << "\n"
       "Triplets:\n";
  return p.str();
}

}  // namespace keo
