#include <doctest.h>

#include <numeric>

#include "keo/errors.hpp"
#include "keo/graph_context.hpp"
#include "support/helpers.hpp"

using namespace keo;

namespace {

KnowledgeGraph path_graph_abcd() {
  KnowledgeGraph g;
  g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
  g.merge_triplet(Triplet{"B", RelationType::kHasCause, "C"});
  g.merge_triplet(Triplet{"C", RelationType::kHasCause, "D"});
  return g;
}

SeedSet seeds_of(std::initializer_list<NodeId> ids) {
  SeedSet s;
  for (NodeId id : ids) s.push_back(ScoredCandidate{id, 1.0});
  return s;
}

}  // namespace

TEST_CASE("expand_m_hop on a path") {
  const KnowledgeGraph g = path_graph_abcd();
  const NodeId a = *g.find_node("A");

  const Subgraph sub = expand_m_hop(g, seeds_of({a}), 2);
  CHECK(sub.node_ids == std::set<NodeId>{*g.find_node("A"), *g.find_node("B"),
                                         *g.find_node("C")});
  REQUIRE(sub.edges.size() == 2);  // A->B, B->C; C->D excluded
}

TEST_CASE("expand_m_hop base cases") {
  KnowledgeGraph g;
  const NodeId solo = g.intern_node("SOLO");
  g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});

  SUBCASE("isolated seed yields a single node and no edges") {
    const Subgraph sub = expand_m_hop(g, seeds_of({solo}), 3);
    CHECK(sub.node_ids == std::set<NodeId>{solo});
    CHECK(sub.edges.empty());
  }
  SUBCASE("m = 0 keeps seed-induced edges") {
    const Subgraph sub = expand_m_hop(g, seeds_of({*g.find_node("A"), *g.find_node("B")}), 0);
    CHECK(sub.node_ids.size() == 2);
    REQUIRE(sub.edges.size() == 1);
    CHECK(sub.edges[0].head == *g.find_node("A"));
  }
  SUBCASE("unknown seed id is an error") {
    CHECK_THROWS_AS(expand_m_hop(g, seeds_of({999}), 1), ValidationError);
    CHECK_THROWS_AS(expand_m_hop(g, {}, 1), ValidationError);
  }
}

TEST_CASE("expansion equals the BFS oracle and is monotone in m") {
  Rng rng(17);
  for (int iter = 0; iter < 60; ++iter) {
    const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 50, 120));
    std::vector<NodeId> seed_ids;
    const std::size_t k = 1 + rng.bounded(3);
    for (std::size_t i = 0; i < k; ++i) {
      seed_ids.push_back(static_cast<NodeId>(rng.bounded(kg.node_count())));
    }
    SeedSet seeds;
    for (NodeId id : std::set<NodeId>(seed_ids.begin(), seed_ids.end())) {
      seeds.push_back(ScoredCandidate{id, 1.0});
    }
    std::set<NodeId> prev;
    for (std::size_t m = 0; m <= 3; ++m) {
      const Subgraph sub = expand_m_hop(kg, seeds, m);
      CHECK(sub.node_ids == test::bfs_oracle(kg, seed_ids, m));
      CHECK(std::includes(sub.node_ids.begin(), sub.node_ids.end(), prev.begin(), prev.end()));
      prev = sub.node_ids;
      // Induced-edge contract: exactly the parent edges inside the node set.
      std::size_t expected_edges = 0;
      for (const auto& [key, w] : kg.edges()) {
        if (sub.node_ids.count(key.head) && sub.node_ids.count(key.tail)) ++expected_edges;
      }
      CHECK(sub.edges.size() == expected_edges);
    }
  }
}

TEST_CASE("to_undirected merges directions, relations, and drops self-loops") {
  SUBCASE("single direction keeps its weight and label") {
    KnowledgeGraph g;
    for (int i = 0; i < 8; ++i) g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(g));
    REQUIRE(ug.edges.size() == 1);
    CHECK(ug.edges[0].weight == 8);
    CHECK(ug.edges[0].relation_label == "HAS CAUSE");
  }
  SUBCASE("both directions sum weights and concatenate labels") {
    KnowledgeGraph g;
    g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    g.merge_triplet(Triplet{"B", RelationType::kHasEffect, "A"});
    g.merge_triplet(Triplet{"B", RelationType::kHasEffect, "A"});
    g.merge_triplet(Triplet{"B", RelationType::kHasEffect, "A"});
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(g));
    REQUIRE(ug.edges.size() == 1);
    CHECK(ug.edges[0].weight == 5);
    CHECK(ug.edges[0].relation_label == "HAS CAUSE \xE2\x88\xA5 HAS EFFECT");
  }
  SUBCASE("self-loops vanish") {
    KnowledgeGraph g;
    g.merge_triplet(Triplet{"A", RelationType::kInstanceOf, "A"});
    g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(g));
    CHECK(ug.edges.size() == 1);
    CHECK(ug.node_ids.size() == 2);
  }
}

TEST_CASE("merge equals the double-loop oracle with weight conservation") {
  Rng rng(23);
  for (int iter = 0; iter < 60; ++iter) {
    const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 20, 60, true));
    const Subgraph sub = full_subgraph(kg);
    const UndirectedMergedGraph ug = to_undirected(sub);
    const auto oracle = test::merge_oracle(sub);

    REQUIRE(ug.edges.size() == oracle.size());
    std::uint64_t merged_total = 0;
    for (const auto& e : ug.edges) {
      auto it = oracle.find({e.u, e.v});
      REQUIRE(it != oracle.end());
      CHECK(e.weight == it->second);
      merged_total += e.weight;
    }

    std::uint64_t directed_total = 0, self_total = 0;
    for (const auto& e : sub.edges) {
      directed_total += e.weight;
      if (e.head == e.tail) self_total += e.weight;
    }
    CHECK(merged_total == directed_total - self_total);
  }
}

TEST_CASE("connected_components matches union-find and orders by smallest id") {
  SUBCASE("empty graph") {
    CHECK(connected_components(UndirectedMergedGraph{}).empty());
  }
  SUBCASE("two disjoint edges") {
    UndirectedMergedGraph ug;
    ug.node_ids = {0, 1, 2, 3};
    ug.edges.push_back(UndirectedMergedEdge{0, 1, 1, "X"});
    ug.edges.push_back(UndirectedMergedEdge{2, 3, 1, "X"});
    const auto comps = connected_components(ug);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::set<NodeId>{0, 1});
    CHECK(comps[1] == std::set<NodeId>{2, 3});
  }
  SUBCASE("random graphs agree with the oracle") {
    Rng rng(31);
    for (int iter = 0; iter < 60; ++iter) {
      const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 50, 60));
      const UndirectedMergedGraph ug = to_undirected(full_subgraph(kg));
      CHECK(connected_components(ug) == test::components_oracle(ug));
    }
  }
}

TEST_CASE("max_spanning_tree basics") {
  SUBCASE("a tree is its own MST") {
    UndirectedMergedGraph ug;
    ug.node_ids = {0, 1, 2};
    ug.edges.push_back(UndirectedMergedEdge{0, 1, 5, "X"});
    ug.edges.push_back(UndirectedMergedEdge{1, 2, 2, "Y"});
    const SpanningTree t = max_spanning_tree(ug);
    CHECK(t.edges.size() == 2);
  }
  SUBCASE("4-cycle with weights 1..4 drops the weight-1 edge") {
    UndirectedMergedGraph ug;
    ug.node_ids = {0, 1, 2, 3};
    ug.edges.push_back(UndirectedMergedEdge{0, 1, 1, "A"});
    ug.edges.push_back(UndirectedMergedEdge{1, 2, 2, "B"});
    ug.edges.push_back(UndirectedMergedEdge{2, 3, 3, "C"});
    ug.edges.push_back(UndirectedMergedEdge{0, 3, 4, "D"});
    const SpanningTree t = max_spanning_tree(ug);
    std::uint64_t total = 0;
    for (const auto& e : t.edges) {
      total += e.weight;
      CHECK(e.weight != 1);
    }
    CHECK(total == 9);
    CHECK(test::mst_weight_oracle(ug) == 9);
  }
  SUBCASE("disconnected input is an error") {
    UndirectedMergedGraph ug;
    ug.node_ids = {0, 1, 2};
    ug.edges.push_back(UndirectedMergedEdge{0, 1, 1, "A"});
    CHECK_THROWS_AS(max_spanning_tree(ug), ValidationError);
  }
  SUBCASE("single node yields an empty tree") {
    UndirectedMergedGraph ug;
    ug.node_ids = {7};
    const SpanningTree t = max_spanning_tree(ug);
    CHECK(t.edges.empty());
    CHECK(t.node_ids == std::set<NodeId>{7});
  }
}

TEST_CASE("Kruskal equals exhaustive enumeration on random connected graphs") {
  Rng rng(41);
  for (int iter = 0; iter < 60; ++iter) {
    const UndirectedMergedGraph ug = test::to_merged(test::random_connected_graph(rng, 8));
    const SpanningTree t = max_spanning_tree(ug);
    CHECK(t.edges.size() + 1 == ug.node_ids.size());
    std::uint64_t total = 0;
    for (const auto& e : t.edges) total += e.weight;
    CHECK(total == test::mst_weight_oracle(ug));
  }
}

TEST_CASE("forest validity on random graphs") {
  Rng rng(53);
  for (int iter = 0; iter < 40; ++iter) {
    const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 30, 40));
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(kg));
    const SpanningForest forest = max_spanning_forest(ug);
    CHECK(forest.component_count() == connected_components(ug).size());

    std::set<NodeId> covered;
    for (const auto& tree : forest.trees) {
      CHECK(tree.edges.size() + 1 == tree.node_ids.size());
      for (NodeId id : tree.node_ids) CHECK(covered.insert(id).second);  // disjoint
      // Acyclic + connected: n-1 edges over n nodes all within the node set,
      // and the whole tree reachable from any node.
      if (!tree.edges.empty()) {
        std::map<NodeId, std::vector<NodeId>> adj;
        for (const auto& e : tree.edges) {
          CHECK(tree.node_ids.count(e.u));
          CHECK(tree.node_ids.count(e.v));
          adj[e.u].push_back(e.v);
          adj[e.v].push_back(e.u);
        }
        std::set<NodeId> seen{*tree.node_ids.begin()};
        std::vector<NodeId> stack{*tree.node_ids.begin()};
        while (!stack.empty()) {
          const NodeId u = stack.back();
          stack.pop_back();
          for (NodeId v : adj[u]) {
            if (seen.insert(v).second) stack.push_back(v);
          }
        }
        CHECK(seen == tree.node_ids);
      }
    }
    CHECK(covered == ug.node_ids);
  }
}

TEST_CASE("traverse_to_text line format and determinism") {
  SUBCASE("single edge emits one line") {
    KnowledgeGraph g;
    for (int i = 0; i < 8; ++i) g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    const SpanningForest forest = max_spanning_forest(to_undirected(full_subgraph(g)));
    CHECK(traverse_to_text(forest, g) == "A -[HAS CAUSE (w=8)]- B");
  }
  SUBCASE("empty forest emits the empty string") {
    KnowledgeGraph g;
    CHECK(traverse_to_text(SpanningForest{}, g).empty());
  }
  SUBCASE("repeated rendering is byte-identical") {
    KnowledgeGraph g;
    g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    g.merge_triplet(Triplet{"B", RelationType::kPartOf, "C"});
    g.merge_triplet(Triplet{"C", RelationType::kLocation, "A"});
    const SpanningForest forest = max_spanning_forest(to_undirected(full_subgraph(g)));
    const std::string once = traverse_to_text(forest, g);
    CHECK(once == traverse_to_text(forest, g));
    CHECK(!once.empty());
  }
  SUBCASE("two components produce two blank-line-separated blocks") {
    KnowledgeGraph g;
    g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});
    g.merge_triplet(Triplet{"C", RelationType::kHasCause, "D"});
    const SpanningForest forest = max_spanning_forest(to_undirected(full_subgraph(g)));
    const std::string text = traverse_to_text(forest, g);
    CHECK(text.find("\n\n") != std::string::npos);
  }
  SUBCASE("every tree edge appears exactly once") {
    Rng rng(61);
    for (int iter = 0; iter < 20; ++iter) {
      const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 20, 30));
      const SpanningForest forest = max_spanning_forest(to_undirected(full_subgraph(kg)));
      const std::string text = traverse_to_text(forest, kg);
      std::size_t lines = 0;
      std::size_t expected = 0;
      for (const auto& tree : forest.trees) expected += tree.edges.size();
      for (char c : text) {
        if (c == '\n') ++lines;
      }
      std::size_t blank_seps = forest.trees.empty() ? 0 : 0;
      // count blocks: blank separators contribute 2 newlines between blocks
      std::size_t nonempty_trees = 0;
      for (const auto& tree : forest.trees) {
        if (!tree.edges.empty()) ++nonempty_trees;
      }
      if (expected == 0) {
        CHECK(text.empty());
      } else {
        // lines = (edges - nonempty_trees) within blocks + 2*(nonempty_trees-1) separators
        CHECK(lines == expected - nonempty_trees + 2 * (nonempty_trees - 1));
        (void)blank_seps;
      }
    }
  }
}

TEST_CASE("traversal starts at the smaller endpoint of the heaviest edge") {
  KnowledgeGraph g;
  g.merge_triplet(Triplet{"A", RelationType::kHasCause, "B"});  // ids 0,1 weight 1
  for (int i = 0; i < 5; ++i) g.merge_triplet(Triplet{"B", RelationType::kPartOf, "C"});
  const SpanningForest forest = max_spanning_forest(to_undirected(full_subgraph(g)));
  const std::string text = traverse_to_text(forest, g);
  // Max edge is B-C (w=5); B has the smaller id, so the walk begins at B.
  CHECK(text.rfind("B -[PART OF (w=5)]- C", 0) == 0);
}
