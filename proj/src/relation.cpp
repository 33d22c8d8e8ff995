#include "keo/relation.hpp"

#include "keo/util.hpp"

namespace keo {

std::string_view relation_label(RelationType r) {
  return kRelationLabels[static_cast<std::size_t>(r)];
}

std::optional<RelationType> relation_from_label(std::string_view label) {
  const std::string canon = canonicalize(label);
  for (int i = 0; i < kRelationCount; ++i) {
    if (canon == kRelationLabels[static_cast<std::size_t>(i)]) {
      return static_cast<RelationType>(i);
    }
  }
  return std::nullopt;
}

std::string relation_label_list() {
  std::string out;
  for (int i = 0; i < kRelationCount; ++i) {
    if (i) out += ", ";
    out += kRelationLabels[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace keo
