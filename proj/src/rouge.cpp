#include "keo/rouge.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

namespace {

std::size_t clipped_overlap(const std::vector<std::string>& pred,
                            const std::vector<std::string>& ref) {
  std::map<std::string, std::size_t> ref_counts;
  for (const auto& t : ref) ref_counts[t] += 1;
  std::size_t match = 0;
  for (const auto& t : pred) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      ++match;
      --it->second;
    }
  }
  return match;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double rouge_f1(std::string_view prediction, std::string_view reference, RougeVariant variant) {
  const auto ref = tokenize_alnum(reference);
  if (ref.empty()) throw ValidationError("rouge_f1: empty reference");
  const auto pred = tokenize_alnum(prediction);
  if (pred.empty()) return 0.0;

  const std::size_t match = variant == RougeVariant::kRouge1 ? clipped_overlap(pred, ref)
                                                             : lcs_length(pred, ref);
  if (match == 0) return 0.0;
  const double precision = static_cast<double>(match) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(match) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace keo
