#pragma once

#include <string>
#include <string_view>

namespace keo {

enum class RougeVariant { kRouge1, kRougeL };

// F1 in [0, 1]. Tokenization: lowercase, split on non-alphanumerics.
// ROUGE-1 uses clipped unigram overlap; ROUGE-L uses the LCS. Empty
// prediction scores 0; an empty reference (after tokenization) is an error.
double rouge_f1(std::string_view prediction, std::string_view reference, RougeVariant variant);

}  // namespace keo
