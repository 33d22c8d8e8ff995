#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace keo {

// Closed relation schema. Labels outside this set are unrepresentable; the
// triplet parser rejects them line by line.
enum class RelationType : int {
  kOwnedBy = 0,
  kInstanceOf,
  kFollowedBy,
  kHasCause,
  kFollows,
  kEventDistance,
  kHasEffect,
  kLocation,
  kUsedBy,
  kInfluencedBy,
  kTimePeriod,
  kPartOf,
  kMaintainedBy,
  kDesignedBy,
};

inline constexpr int kRelationCount = 14;

inline constexpr std::array<std::string_view, kRelationCount> kRelationLabels = {
    "OWNED BY",       "INSTANCE OF", "FOLLOWED BY", "HAS CAUSE",     "FOLLOWS",
    "EVENT DISTANCE", "HAS EFFECT",  "LOCATION",    "USED BY",       "INFLUENCED BY",
    "TIME PERIOD",    "PART OF",     "MAINTAINED BY", "DESIGNED BY",
};

std::string_view relation_label(RelationType r);

// Canonicalizes the candidate (case/whitespace) before matching.
std::optional<RelationType> relation_from_label(std::string_view label);

// The schema rendered as a comma-separated list for prompt text.
std::string relation_label_list();

}  // namespace keo
