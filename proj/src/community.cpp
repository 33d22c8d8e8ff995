#include "keo/community.hpp"

#include <algorithm>
#include <map>

#include "keo/errors.hpp"
#include "keo/leiden.hpp"
#include "keo/util.hpp"

namespace keo {

namespace {

// Dense index mapping for the merged graph's node ids.
struct DenseMap {
  std::vector<NodeId> ids;           // dense -> NodeId, ascending
  std::map<NodeId, int> to_dense;

  explicit DenseMap(const UndirectedMergedGraph& ug) {
    ids.assign(ug.node_ids.begin(), ug.node_ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) to_dense[ids[i]] = static_cast<int>(i);
  }
};

detail::LeidenGraph to_leiden(const UndirectedMergedGraph& ug, const DenseMap& dm) {
  std::vector<std::tuple<int, int, double>> edges;
  edges.reserve(ug.edges.size());
  for (const auto& e : ug.edges) {
    edges.emplace_back(dm.to_dense.at(e.u), dm.to_dense.at(e.v),
                       static_cast<double>(e.weight));
  }
  return detail::LeidenGraph::from_edges(dm.ids.size(), edges);
}

std::vector<std::set<NodeId>> group_by_community(const std::vector<int>& community,
                                                 const DenseMap& dm) {
  int n_comm = 0;
  for (int c : community) n_comm = std::max(n_comm, c + 1);
  std::vector<std::set<NodeId>> groups(static_cast<std::size_t>(n_comm));
  for (std::size_t v = 0; v < community.size(); ++v) {
    groups[static_cast<std::size_t>(community[v])].insert(dm.ids[v]);
  }
  return groups;
}

}  // namespace

CommunityHierarchy detect_communities(const UndirectedMergedGraph& ug, double resolution,
                                      std::uint64_t rng_seed) {
  if (ug.node_ids.empty()) throw ValidationError("detect_communities: empty graph");
  const DenseMap dm(ug);
  const detail::LeidenGraph g = to_leiden(ug, dm);

  CommunityHierarchy h;
  std::vector<int> assignment = detail::leiden_communities(g, resolution, rng_seed);
  {
    std::vector<Community> leaves;
    for (auto& group : group_by_community(assignment, dm)) {
      leaves.push_back(Community{std::move(group), -1, ""});
    }
    h.levels.push_back(std::move(leaves));
  }

  double gamma = resolution;
  while (h.levels.size() < 4 && h.levels.back().size() > 3) {
    const auto& below = h.levels.back();

    // Aggregate graph: one node per community below, inter-community weights
    // summed, intra weights as self-loops.
    std::vector<int> comm_of(dm.ids.size());
    for (std::size_t c = 0; c < below.size(); ++c) {
      for (NodeId id : below[c].node_ids) {
        comm_of[static_cast<std::size_t>(dm.to_dense.at(id))] = static_cast<int>(c);
      }
    }
    std::vector<std::tuple<int, int, double>> agg_edges;
    for (const auto& e : ug.edges) {
      agg_edges.emplace_back(comm_of[static_cast<std::size_t>(dm.to_dense.at(e.u))],
                             comm_of[static_cast<std::size_t>(dm.to_dense.at(e.v))],
                             static_cast<double>(e.weight));
    }
    const auto agg = detail::LeidenGraph::from_edges(below.size(), agg_edges);

    // Self-loops from intra-community weight raise node strengths, so a
    // single halving rarely merges anything; keep lowering the resolution
    // until a coarser grouping appears or the sweep bottoms out.
    std::vector<int> grouping;
    int n_groups = static_cast<int>(below.size());
    for (int attempt = 0; attempt < 6 && static_cast<std::size_t>(n_groups) == below.size();
         ++attempt) {
      gamma /= 2.0;
      grouping = detail::leiden_communities(agg, gamma, rng_seed + h.levels.size());
      n_groups = 0;
      for (int c : grouping) n_groups = std::max(n_groups, c + 1);
    }
    if (static_cast<std::size_t>(n_groups) == below.size()) break;  // no coarsening found

    std::vector<Community> parents(static_cast<std::size_t>(n_groups));
    for (std::size_t c = 0; c < below.size(); ++c) {
      auto& parent = parents[static_cast<std::size_t>(grouping[c])];
      parent.node_ids.insert(below[c].node_ids.begin(), below[c].node_ids.end());
    }
    for (std::size_t c = 0; c < below.size(); ++c) {
      h.levels.back()[c].parent = grouping[c];
    }
    h.levels.push_back(std::move(parents));
  }
  return h;
}

double modularity(const UndirectedMergedGraph& ug,
                  const std::vector<std::set<NodeId>>& partition, double gamma) {
  const DenseMap dm(ug);
  std::vector<int> assignment(dm.ids.size(), -1);
  for (std::size_t c = 0; c < partition.size(); ++c) {
    for (NodeId id : partition[c]) {
      auto it = dm.to_dense.find(id);
      if (it == dm.to_dense.end()) throw ValidationError("modularity: unknown node id");
      if (assignment[static_cast<std::size_t>(it->second)] != -1) {
        throw ValidationError("modularity: partition sets overlap");
      }
      assignment[static_cast<std::size_t>(it->second)] = static_cast<int>(c);
    }
  }
  for (int a : assignment) {
    if (a < 0) throw ValidationError("modularity: partition does not cover the node set");
  }
  return detail::leiden_modularity(to_leiden(ug, dm), assignment, gamma);
}

namespace {

std::string clip(std::string s, std::size_t budget) {
  utf8_truncate(s, budget);
  return s;
}

}  // namespace

std::string summarize_leaf(const std::set<NodeId>& community, const UndirectedMergedGraph& ug,
                           const KnowledgeGraph& kg, std::size_t budget,
                           const SummarizeFn& llm, int community_index) {
  if (community.empty()) throw ValidationError("summarize_leaf: empty community");

  // Within-community degree and incident merged labels per member.
  std::map<NodeId, int> degree;
  std::map<NodeId, std::set<std::string>> labels;
  for (NodeId id : community) degree[id] = 0;
  for (const auto& e : ug.edges) {
    if (!community.count(e.u) || !community.count(e.v)) continue;
    degree[e.u] += 1;
    degree[e.v] += 1;
    labels[e.u].insert(e.relation_label);
    labels[e.v].insert(e.relation_label);
  }
  std::vector<NodeId> order(community.begin(), community.end());
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (degree[a] != degree[b]) return degree[a] > degree[b];
    return a < b;
  });

  std::string material;
  for (NodeId id : order) {
    std::string entry = kg.node(id).surface;
    const auto& ls = labels[id];
    if (!ls.empty()) {
      entry += " (";
      bool first = true;
      for (const auto& l : ls) {
        if (!first) entry += ", ";
        first = false;
        entry += l;
      }
      entry += ")";
    }
    if (material.empty()) {
      material = entry;
    } else if (!llm && material.size() + 2 + entry.size() > budget) {
      break;  // fallback respects the budget while building
    } else {
      material += "; " + entry;
    }
  }

  if (llm) {
    try {
      return clip(llm(material, budget), budget);
    } catch (const TransportError& e) {
      throw TransportError("summarizing community " + std::to_string(community_index) + ": " +
                               e.what(),
                           e.retryable());
    }
  }
  return clip(std::move(material), budget);
}

std::string summarize_parent(const std::vector<std::string>& child_summaries,
                             std::size_t budget, const SummarizeFn& llm,
                             int community_index) {
  if (child_summaries.empty()) throw ValidationError("summarize_parent: no child summaries");
  std::string joined;
  for (const auto& c : child_summaries) {
    if (!joined.empty()) joined += " ";
    joined += c;
  }
  if (llm) {
    try {
      return clip(llm(joined, budget), budget);
    } catch (const TransportError& e) {
      throw TransportError("summarizing community " + std::to_string(community_index) + ": " +
                               e.what(),
                           e.retryable());
    }
  }
  if (joined.size() <= budget) return joined;
  // Truncate at the last sentence boundary inside the budget; hard cut when
  // there is none.
  const std::string_view view(joined);
  std::size_t cut = 0;
  for (std::size_t i = budget; i > 0; --i) {
    const char c = view[i - 1];
    if (c == '.' || c == '!' || c == '?') {
      cut = i;
      break;
    }
  }
  if (cut > 0) return joined.substr(0, cut);
  std::string hard = joined;
  utf8_truncate(hard, budget);
  return hard;
}

void summarize_hierarchy(CommunityHierarchy& h, const UndirectedMergedGraph& ug,
                         const KnowledgeGraph& kg, std::size_t leaf_budget,
                         std::size_t parent_budget, const SummarizeFn& llm) {
  if (h.empty()) return;
  for (std::size_t c = 0; c < h.levels[0].size(); ++c) {
    h.levels[0][c].summary = summarize_leaf(h.levels[0][c].node_ids, ug, kg, leaf_budget, llm,
                                            static_cast<int>(c));
  }
  for (std::size_t lvl = 1; lvl < h.levels.size(); ++lvl) {
    for (std::size_t c = 0; c < h.levels[lvl].size(); ++c) {
      std::vector<std::string> children;
      for (const auto& child : h.levels[lvl - 1]) {
        if (child.parent == static_cast<int>(c)) children.push_back(child.summary);
      }
      h.levels[lvl][c].summary =
          summarize_parent(children, parent_budget, llm, static_cast<int>(c));
    }
  }
}

std::string assemble_context(const std::string& traversal_text,
                             const CommunityHierarchy& hierarchy,
                             const std::vector<std::size_t>& level_budgets,
                             std::size_t total_budget) {
  std::string summaries;
  if (!hierarchy.empty()) {
    for (std::size_t i = hierarchy.levels.size(); i-- > 0;) {
      std::string block;
      for (const auto& c : hierarchy.levels[i]) {
        if (c.summary.empty()) continue;
        if (!block.empty()) block += "\n";
        block += c.summary;
      }
      if (block.empty()) continue;
      if (!level_budgets.empty()) {
        const std::size_t budget =
            level_budgets[std::min(i, level_budgets.size() - 1)];
        utf8_truncate(block, budget);
      }
      if (!summaries.empty()) summaries += "\n";
      summaries += block;
    }
  }

  std::string context;
  if (summaries.empty()) {
    context = traversal_text;
  } else {
    context = summaries + "\n---\n" + traversal_text;
  }
  utf8_truncate(context, total_budget);
  return context;
}

}  // namespace keo
