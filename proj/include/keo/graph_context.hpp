#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "keo/index.hpp"
#include "keo/kg.hpp"

namespace keo {

// Induced subgraph: every directed edge of the parent graph whose endpoints
// both lie in node_ids.
struct Subgraph {
  std::set<NodeId> node_ids;
  std::vector<DirectedEdge> edges;
};

// One undirected edge per unordered endpoint pair: weight sums every directed
// edge between the endpoints (both directions, all relations); the label
// concatenates the contributing relation labels with " ∥ ", smaller-id->larger
// direction first.
struct UndirectedMergedEdge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  std::uint64_t weight = 0;
  std::string relation_label;
};

struct UndirectedMergedGraph {
  std::set<NodeId> node_ids;
  std::vector<UndirectedMergedEdge> edges;  // sorted by (u, v), unique pairs
};

struct SpanningTree {
  std::set<NodeId> node_ids;
  std::vector<UndirectedMergedEdge> edges;  // |edges| == |nodes| - 1
};

struct SpanningForest {
  std::vector<SpanningTree> trees;
  std::size_t component_count() const { return trees.size(); }
};

// Nodes within m undirected hops of any seed, plus all directed edges between
// them. Throws if a seed id is not in the graph.
Subgraph expand_m_hop(const KnowledgeGraph& graph, const SeedSet& seeds, std::size_t m);

// The whole graph as a Subgraph (community detection runs over the full KG).
Subgraph full_subgraph(const KnowledgeGraph& graph);

// Directed -> undirected merge; self-loops are dropped (they cannot join any
// spanning tree).
UndirectedMergedGraph to_undirected(const Subgraph& sub);

// Maximal connected node sets, ordered by smallest member id.
std::vector<std::set<NodeId>> connected_components(const UndirectedMergedGraph& ug);

// Kruskal maximum spanning tree of a connected graph. Tie order: weight desc,
// then (u asc, v asc, label asc). Throws on disconnected input.
SpanningTree max_spanning_tree(const UndirectedMergedGraph& component);

// One MST per connected component.
SpanningForest max_spanning_forest(const UndirectedMergedGraph& ug);

// DFS serialization: per tree, start at the smaller-id endpoint of the tree's
// maximum-weight edge; each edge emits "SURFACE_U -[LABEL (w=W)]- SURFACE_V"
// in visit order; neighbor order is weight desc then id asc; tree blocks are
// separated by a blank line.
std::string traverse_to_text(const SpanningForest& forest, const KnowledgeGraph& graph);

}  // namespace keo
