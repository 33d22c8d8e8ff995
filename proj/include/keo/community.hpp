#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "keo/graph_context.hpp"
#include "keo/kg.hpp"

namespace keo {

struct Community {
  std::set<NodeId> node_ids;
  int parent = -1;  // index into the next level up; -1 at the top level
  std::string summary;
};

// levels[0] = leaf partition; each higher level is a coarsening of the one
// below. Every level partitions the full node set.
struct CommunityHierarchy {
  std::vector<std::vector<Community>> levels;

  bool empty() const { return levels.empty(); }
  std::size_t depth() const { return levels.size(); }
};

// Leiden over the merged graph. Leaves come from a full Leiden run at the
// given resolution; parent levels rerun Leiden on the community aggregate at
// successively halved resolution until a level has <= 3 communities, nothing
// coarsens further, or 4 levels exist. Deterministic in (graph, resolution,
// rng_seed); every community is internally connected.
CommunityHierarchy detect_communities(const UndirectedMergedGraph& ug, double resolution,
                                      std::uint64_t rng_seed);

// Weighted modularity of a node partition at resolution gamma.
double modularity(const UndirectedMergedGraph& ug,
                  const std::vector<std::set<NodeId>>& partition, double gamma = 1.0);

// Optional LLM hook: (material, budget) -> summary. Null means the
// deterministic extractive fallback.
using SummarizeFn = std::function<std::string(const std::string&, std::size_t)>;

// Fallback: nodes by descending within-community degree (ties by id) with
// their incident merged relation labels, greedily appended under budget.
std::string summarize_leaf(const std::set<NodeId>& community, const UndirectedMergedGraph& ug,
                           const KnowledgeGraph& kg, std::size_t budget,
                           const SummarizeFn& llm = nullptr, int community_index = -1);

// Fallback: child summaries concatenated in child order, truncated at a
// sentence boundary within budget.
std::string summarize_parent(const std::vector<std::string>& child_summaries,
                             std::size_t budget, const SummarizeFn& llm = nullptr,
                             int community_index = -1);

// Fills every community's summary, leaves first then parents per level.
void summarize_hierarchy(CommunityHierarchy& h, const UndirectedMergedGraph& ug,
                         const KnowledgeGraph& kg, std::size_t leaf_budget,
                         std::size_t parent_budget, const SummarizeFn& llm = nullptr);

// Community summaries (top level first, then descending), a separator line,
// then the traversal text. level_budgets[i] caps level i's summary block
// (the last entry extends to deeper levels); the result is clipped to
// total_budget characters.
std::string assemble_context(const std::string& traversal_text,
                             const CommunityHierarchy& hierarchy,
                             const std::vector<std::size_t>& level_budgets,
                             std::size_t total_budget);

}  // namespace keo
