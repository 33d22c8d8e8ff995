#pragma once

#include <cstdint>
#include <vector>

#include "keo/benchmark.hpp"
#include "keo/corpus.hpp"

namespace keo {

// Synthetic aviation-maintenance corpus. Each record is one to three
// uppercase sentences drawn from a fixed pattern grammar over a fixed entity
// pool, so a rule-based extractor can derive triplets from the text alone.
// Deterministic in (count, seed). Corpus size is a parameter by design.
std::vector<Record> make_fixture_corpus(std::size_t count, std::uint64_t seed);

// Synthetic problem-action pairs. Action phrasing is disjoint from the
// corpus grammar so the gold-leakage guard passes against any fixture corpus.
std::vector<ProblemAction> make_fixture_pairs(std::size_t count, std::uint64_t seed);

}  // namespace keo
