#include "keo/graph_context.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "keo/errors.hpp"

namespace keo {

namespace {
constexpr const char* kLabelJoin = " \xE2\x88\xA5 ";  // " ∥ "
}

Subgraph expand_m_hop(const KnowledgeGraph& graph, const SeedSet& seeds, std::size_t m) {
  if (seeds.empty()) throw ValidationError("expand_m_hop: empty seed set");
  for (const auto& s : seeds) {
    if (!graph.has_node(s.target)) {
      throw ValidationError("expand_m_hop: unknown seed id " + std::to_string(s.target));
    }
  }

  const auto adj = graph.undirected_adjacency();
  std::map<NodeId, std::size_t> dist;
  std::deque<NodeId> frontier;
  for (const auto& s : seeds) {
    if (!dist.count(s.target)) {
      dist[s.target] = 0;
      frontier.push_back(s.target);
    }
  }
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    const std::size_t d = dist[u];
    if (d == m) continue;
    for (NodeId v : adj[static_cast<std::size_t>(u)]) {
      if (!dist.count(v)) {
        dist[v] = d + 1;
        frontier.push_back(v);
      }
    }
  }

  Subgraph sub;
  for (const auto& [id, d] : dist) sub.node_ids.insert(id);
  for (const auto& [key, w] : graph.edges()) {
    if (sub.node_ids.count(key.head) && sub.node_ids.count(key.tail)) {
      sub.edges.push_back(DirectedEdge{key.head, key.tail, key.relation, w});
    }
  }
  return sub;
}

Subgraph full_subgraph(const KnowledgeGraph& graph) {
  Subgraph sub;
  for (const auto& n : graph.nodes()) sub.node_ids.insert(n.id);
  for (const auto& [key, w] : graph.edges()) {
    sub.edges.push_back(DirectedEdge{key.head, key.tail, key.relation, w});
  }
  return sub;
}

UndirectedMergedGraph to_undirected(const Subgraph& sub) {
  struct Merged {
    std::uint64_t weight = 0;
    std::vector<std::string> forward_labels;   // smaller-id -> larger-id
    std::vector<std::string> backward_labels;  // larger-id -> smaller-id
  };
  std::map<std::pair<NodeId, NodeId>, Merged> merged;
  for (const auto& e : sub.edges) {
    if (e.head == e.tail) continue;
    const NodeId u = std::min(e.head, e.tail);
    const NodeId v = std::max(e.head, e.tail);
    Merged& m = merged[{u, v}];
    m.weight += e.weight;
    auto& labels = e.head == u ? m.forward_labels : m.backward_labels;
    labels.emplace_back(relation_label(e.relation));
  }

  UndirectedMergedGraph ug;
  ug.node_ids = sub.node_ids;
  for (auto& [pair, m] : merged) {
    // Forward-direction labels first, each direction's labels alphabetical.
    std::sort(m.forward_labels.begin(), m.forward_labels.end());
    std::sort(m.backward_labels.begin(), m.backward_labels.end());
    std::string label;
    for (const auto& l : m.forward_labels) {
      if (!label.empty()) label += kLabelJoin;
      label += l;
    }
    for (const auto& l : m.backward_labels) {
      if (!label.empty()) label += kLabelJoin;
      label += l;
    }
    ug.edges.push_back(UndirectedMergedEdge{pair.first, pair.second, m.weight, label});
  }
  return ug;
}

namespace {

// Plain iterative DFS; recursion depth is unbounded on path graphs.
std::vector<std::set<NodeId>> dfs_components(const UndirectedMergedGraph& ug) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (NodeId id : ug.node_ids) adj[id];
  for (const auto& e : ug.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::set<NodeId> seen;
  std::vector<std::set<NodeId>> components;
  for (const auto& [start, _] : adj) {
    if (seen.count(start)) continue;
    std::set<NodeId> comp;
    std::vector<NodeId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      comp.insert(u);
      for (NodeId v : adj[u]) {
        if (seen.insert(v).second) stack.push_back(v);
      }
    }
    components.push_back(std::move(comp));
  }
  // Iteration over the id-ordered map already yields components by smallest
  // member id; keep the explicit sort as the contract.
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
  return components;
}

struct UnionFind {
  std::map<NodeId, NodeId> parent;
  NodeId find(NodeId x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    while (it->second != x) {
      x = it->second;
      it = parent.find(x);
    }
    return x;
  }
  bool unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

std::vector<std::set<NodeId>> connected_components(const UndirectedMergedGraph& ug) {
  return dfs_components(ug);
}

SpanningTree max_spanning_tree(const UndirectedMergedGraph& component) {
  if (component.node_ids.empty()) throw ValidationError("max_spanning_tree: empty component");

  std::vector<UndirectedMergedEdge> edges = component.edges;
  std::sort(edges.begin(), edges.end(),
            [](const UndirectedMergedEdge& a, const UndirectedMergedEdge& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              if (a.u != b.u) return a.u < b.u;
              if (a.v != b.v) return a.v < b.v;
              return a.relation_label < b.relation_label;
            });

  SpanningTree tree;
  tree.node_ids = component.node_ids;
  UnionFind uf;
  for (const auto& e : edges) {
    if (uf.unite(e.u, e.v)) tree.edges.push_back(e);
  }
  if (tree.edges.size() + 1 != component.node_ids.size()) {
    throw ValidationError("max_spanning_tree: input is not connected");
  }
  return tree;
}

SpanningForest max_spanning_forest(const UndirectedMergedGraph& ug) {
  SpanningForest forest;
  for (const auto& comp : connected_components(ug)) {
    UndirectedMergedGraph sub;
    sub.node_ids = comp;
    for (const auto& e : ug.edges) {
      if (comp.count(e.u) && comp.count(e.v)) sub.edges.push_back(e);
    }
    forest.trees.push_back(max_spanning_tree(sub));
  }
  return forest;
}

std::string traverse_to_text(const SpanningForest& forest, const KnowledgeGraph& graph) {
  std::vector<std::string> blocks;
  for (const auto& tree : forest.trees) {
    if (tree.edges.empty()) continue;

    // Adjacency with deterministic neighbor order: weight desc, then id asc.
    std::map<NodeId, std::vector<const UndirectedMergedEdge*>> adj;
    for (const auto& e : tree.edges) {
      adj[e.u].push_back(&e);
      adj[e.v].push_back(&e);
    }
    for (auto& [id, nbrs] : adj) {
      std::sort(nbrs.begin(), nbrs.end(),
                [id = id](const UndirectedMergedEdge* a, const UndirectedMergedEdge* b) {
                  if (a->weight != b->weight) return a->weight > b->weight;
                  const NodeId an = a->u == id ? a->v : a->u;
                  const NodeId bn = b->u == id ? b->v : b->u;
                  return an < bn;
                });
    }

    const auto start_edge = std::max_element(
        tree.edges.begin(), tree.edges.end(),
        [](const UndirectedMergedEdge& a, const UndirectedMergedEdge& b) {
          if (a.weight != b.weight) return a.weight < b.weight;
          return std::make_pair(a.u, a.v) > std::make_pair(b.u, b.v);
        });
    const NodeId start = std::min(start_edge->u, start_edge->v);

    std::ostringstream block;
    bool first_line = true;
    std::set<const UndirectedMergedEdge*> visited;
    // DFS over edges; emit each edge as it is first traversed.
    std::vector<std::pair<NodeId, std::size_t>> stack{{start, 0}};
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto& nbrs = adj[u];
      if (next >= nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const UndirectedMergedEdge* e = nbrs[next++];
      if (visited.count(e)) continue;
      visited.insert(e);
      const NodeId v = e->u == u ? e->v : e->u;
      if (!first_line) block << "\n";
      first_line = false;
      block << graph.node(u).surface << " -[" << e->relation_label << " (w=" << e->weight
            << ")]- " << graph.node(v).surface;
      stack.emplace_back(v, 0);
    }
    blocks.push_back(block.str());
  }

  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += "\n\n";
    out += blocks[i];
  }
  return out;
}

}  // namespace keo
