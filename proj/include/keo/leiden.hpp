#pragma once

#include <cstdint>
#include <vector>

#include "keo/util.hpp"

namespace keo::detail {

// Compact weighted undirected graph used by the Leiden passes. Nodes are
// dense indices; self-loops appear when the graph is an aggregate.
struct LeidenGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor, weight), no self entries
  std::vector<double> self_loop;
  std::vector<double> strength;  // sum of incident weights + 2 * self_loop
  double two_m = 0.0;            // sum of strengths

  static LeidenGraph from_edges(std::size_t n,
                                const std::vector<std::tuple<int, int, double>>& edges);
};

// Full Leiden cycle (local moving, refinement, aggregation) repeated until
// stable. Refinement uses the greedy limit of the randomized merge step so
// results are a pure function of (graph, gamma, seed). Returns a dense
// community id per node; every community is internally connected.
std::vector<int> leiden_communities(const LeidenGraph& g, double gamma, std::uint64_t seed);

// Weighted modularity of a partition at resolution gamma (community id per node).
double leiden_modularity(const LeidenGraph& g, const std::vector<int>& community, double gamma);

}  // namespace keo::detail
