#pragma once

// Test-only generators and independent oracles. Everything here must stay
// independent of the implementation paths it checks: plain double loops,
// frontier BFS, exhaustive enumeration.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "keo/graph_context.hpp"
#include "keo/kg.hpp"
#include "keo/util.hpp"

namespace keo::test {

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("keo-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string dir() const { return path_.string(); }

private:
  std::filesystem::path path_;
};

// ---- random instances -------------------------------------------------

struct RandomDigraph {
  std::size_t n = 0;
  // (head, tail, relation index, weight)
  std::vector<std::tuple<int, int, int, std::uint64_t>> edges;
};

inline RandomDigraph random_digraph(Rng& rng, std::size_t max_nodes, std::size_t max_edges,
                                    bool allow_self_loops = false) {
  RandomDigraph g;
  g.n = 1 + rng.bounded(max_nodes);
  const std::size_t m = rng.bounded(max_edges + 1);
  for (std::size_t e = 0; e < m; ++e) {
    const int h = static_cast<int>(rng.bounded(g.n));
    int t = static_cast<int>(rng.bounded(g.n));
    if (!allow_self_loops && t == h && g.n > 1) t = (t + 1) % static_cast<int>(g.n);
    g.edges.emplace_back(h, t, static_cast<int>(rng.bounded(kRelationCount)),
                         1 + rng.bounded(9));
  }
  return g;
}

// Builds a KnowledgeGraph with surfaces "N0".."Nk" so node ids equal indices.
inline KnowledgeGraph to_kg(const RandomDigraph& g) {
  KnowledgeGraph kg;
  for (std::size_t i = 0; i < g.n; ++i) kg.intern_node("N" + std::to_string(i));
  for (const auto& [h, t, r, w] : g.edges) {
    for (std::uint64_t k = 0; k < w; ++k) {
      kg.merge_triplet(Triplet{"N" + std::to_string(h), static_cast<RelationType>(r),
                               "N" + std::to_string(t)});
    }
  }
  return kg;
}

// Connected undirected weighted graph: a random spanning tree plus extras.
struct RandomWeightedGraph {
  std::size_t n = 0;
  std::vector<std::tuple<int, int, std::uint64_t>> edges;  // u < v, unique pairs
};

inline RandomWeightedGraph random_connected_graph(Rng& rng, std::size_t max_nodes,
                                                  std::uint64_t max_weight = 20) {
  RandomWeightedGraph g;
  g.n = 2 + rng.bounded(max_nodes - 1);
  std::set<std::pair<int, int>> used;
  for (std::size_t v = 1; v < g.n; ++v) {
    const int u = static_cast<int>(rng.bounded(v));
    used.insert({u, static_cast<int>(v)});
  }
  // Extra edges with probability ~0.3 per pair.
  for (std::size_t u = 0; u < g.n; ++u) {
    for (std::size_t v = u + 1; v < g.n; ++v) {
      if (used.count({static_cast<int>(u), static_cast<int>(v)})) continue;
      if (rng.bounded(10) < 3) used.insert({static_cast<int>(u), static_cast<int>(v)});
    }
  }
  for (const auto& [u, v] : used) g.edges.emplace_back(u, v, 1 + rng.bounded(max_weight));
  return g;
}

inline UndirectedMergedGraph to_merged(const RandomWeightedGraph& g) {
  UndirectedMergedGraph ug;
  for (std::size_t i = 0; i < g.n; ++i) ug.node_ids.insert(static_cast<NodeId>(i));
  for (const auto& [u, v, w] : g.edges) {
    ug.edges.push_back(UndirectedMergedEdge{u, v, w, "HAS CAUSE"});
  }
  return ug;
}

// ---- independent oracles ----------------------------------------------

// Frontier-by-frontier BFS over an adjacency-set matrix built by double loop.
inline std::set<NodeId> bfs_oracle(const KnowledgeGraph& kg, const std::vector<NodeId>& seeds,
                                   std::size_t m) {
  const std::size_t n = kg.node_count();
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& [key, w] : kg.edges()) {
    if (key.head == key.tail) continue;
    adj[static_cast<std::size_t>(key.head)].insert(static_cast<std::size_t>(key.tail));
    adj[static_cast<std::size_t>(key.tail)].insert(static_cast<std::size_t>(key.head));
  }
  std::set<NodeId> reached(seeds.begin(), seeds.end());
  std::set<NodeId> frontier = reached;
  for (std::size_t hop = 0; hop < m && !frontier.empty(); ++hop) {
    std::set<NodeId> next;
    for (NodeId u : frontier) {
      for (std::size_t v : adj[static_cast<std::size_t>(u)]) {
        if (!reached.count(static_cast<NodeId>(v))) next.insert(static_cast<NodeId>(v));
      }
    }
    reached.insert(next.begin(), next.end());
    frontier = std::move(next);
  }
  return reached;
}

// Naive double-loop direction summation for the undirected merge.
inline std::map<std::pair<NodeId, NodeId>, std::uint64_t> merge_oracle(const Subgraph& sub) {
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> out;
  std::vector<NodeId> nodes(sub.node_ids.begin(), sub.node_ids.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      std::uint64_t total = 0;
      for (const auto& e : sub.edges) {
        const bool forward = e.head == nodes[i] && e.tail == nodes[j];
        const bool backward = e.head == nodes[j] && e.tail == nodes[i];
        if (forward || backward) total += e.weight;
      }
      if (total > 0) out[{nodes[i], nodes[j]}] = total;
    }
  }
  return out;
}

// Union-find components, implemented apart from the DFS under test.
inline std::vector<std::set<NodeId>> components_oracle(const UndirectedMergedGraph& ug) {
  std::map<NodeId, NodeId> parent;
  for (NodeId id : ug.node_ids) parent[id] = id;
  std::function<NodeId(NodeId)> find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : ug.edges) parent[find(e.u)] = find(e.v);
  std::map<NodeId, std::set<NodeId>> groups;
  for (NodeId id : ug.node_ids) groups[find(id)].insert(id);
  std::vector<std::set<NodeId>> out;
  for (auto& [root, group] : groups) out.push_back(std::move(group));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
  return out;
}

// Exhaustive maximum-spanning-tree weight by enumerating all (n-1)-edge
// subsets that connect the graph.
inline std::uint64_t mst_weight_oracle(const UndirectedMergedGraph& ug) {
  const std::vector<NodeId> nodes(ug.node_ids.begin(), ug.node_ids.end());
  const std::size_t n = nodes.size();
  if (n <= 1) return 0;
  const std::size_t need = n - 1;
  std::map<NodeId, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[nodes[i]] = i;

  std::uint64_t best = 0;
  bool found = false;
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (chosen.size() == need) {
      // Connectivity by flood fill over the chosen edges.
      std::vector<std::set<std::size_t>> adj(n);
      std::uint64_t weight = 0;
      for (std::size_t e : chosen) {
        const auto& edge = ug.edges[e];
        adj[idx[edge.u]].insert(idx[edge.v]);
        adj[idx[edge.v]].insert(idx[edge.u]);
        weight += edge.weight;
      }
      std::set<std::size_t> seen{0};
      std::vector<std::size_t> stack{0};
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : adj[u]) {
          if (seen.insert(v).second) stack.push_back(v);
        }
      }
      if (seen.size() == n && (!found || weight > best)) {
        best = weight;
        found = true;
      }
      return;
    }
    if (start >= ug.edges.size()) return;
    if (ug.edges.size() - start < need - chosen.size()) return;
    chosen.push_back(start);
    rec(start + 1);
    chosen.pop_back();
    rec(start + 1);
  };
  rec(0);
  return best;
}

}  // namespace keo::test
