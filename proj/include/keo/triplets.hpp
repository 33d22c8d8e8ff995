#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "keo/kg.hpp"

namespace keo {

// Strict: head and tail surfaces must already exist in the known-node set.
// Loose: unknown surfaces create new nodes downstream.
enum class ParseMode { kStrict, kLoose };

struct RejectedLine {
  long line = 0;        // 1-based position in the input
  std::string text;     // the offending line, trimmed
  std::string reason;
};

struct ParsedTriplets {
  std::vector<Triplet> accepted;
  std::vector<RejectedLine> rejected;
};

// Parses LLM triplet output, one `<entity1, relation, entity2>` per line.
// Total: never throws on malformed text; every non-blank line lands in
// exactly one of accepted/rejected. known_nodes holds canonicalized surfaces
// and is only consulted in strict mode.
ParsedTriplets parse_triplets(std::string_view text, ParseMode mode,
                              const std::set<std::string>& known_nodes = {});

// Appendix-style KG extraction prompt: fixed template, the record text
// substituted in, and the current node surfaces (most recently used first,
// truncated to hint_budget) injected into the guidelines.
std::string render_kg_prompt(std::string_view record_text,
                             const std::vector<std::string>& current_nodes,
                             std::size_t hint_budget = 500);

}  // namespace keo
