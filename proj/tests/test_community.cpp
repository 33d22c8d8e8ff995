#include <doctest.h>

#include "keo/community.hpp"
#include "keo/errors.hpp"
#include "keo/graph_context.hpp"
#include "support/helpers.hpp"

using namespace keo;

namespace {

// Two k-cliques joined by one weight-1 bridge (clique edges weight w).
UndirectedMergedGraph two_cliques(std::size_t k, std::uint64_t w = 2) {
  UndirectedMergedGraph ug;
  for (std::size_t i = 0; i < 2 * k; ++i) ug.node_ids.insert(static_cast<NodeId>(i));
  auto add_clique = [&](std::size_t base) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        ug.edges.push_back(UndirectedMergedEdge{static_cast<NodeId>(base + i),
                                                static_cast<NodeId>(base + j), w, "HAS CAUSE"});
      }
    }
  };
  add_clique(0);
  add_clique(k);
  ug.edges.push_back(
      UndirectedMergedEdge{static_cast<NodeId>(k - 1), static_cast<NodeId>(k), 1, "HAS CAUSE"});
  return ug;
}

std::vector<std::set<NodeId>> level_partition(const std::vector<Community>& level) {
  std::vector<std::set<NodeId>> out;
  for (const auto& c : level) out.push_back(c.node_ids);
  return out;
}

void check_partition_covers(const std::vector<Community>& level,
                            const std::set<NodeId>& nodes) {
  std::set<NodeId> seen;
  for (const auto& c : level) {
    for (NodeId id : c.node_ids) {
      CHECK(seen.insert(id).second);
    }
  }
  CHECK(seen == nodes);
}

void check_connected(const UndirectedMergedGraph& ug, const std::set<NodeId>& community) {
  if (community.size() <= 1) return;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : ug.edges) {
    if (community.count(e.u) && community.count(e.v)) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
  }
  std::set<NodeId> seen{*community.begin()};
  std::vector<NodeId> stack{*community.begin()};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj[u]) {
      if (seen.insert(v).second) stack.push_back(v);
    }
  }
  CHECK(seen == community);
}

}  // namespace

TEST_CASE("single node yields one singleton community") {
  UndirectedMergedGraph ug;
  ug.node_ids = {0};
  const CommunityHierarchy h = detect_communities(ug, 1.0, 0);
  REQUIRE(h.depth() == 1);
  REQUIRE(h.levels[0].size() == 1);
  CHECK(h.levels[0][0].node_ids == std::set<NodeId>{0});
  CHECK_THROWS_AS(detect_communities(UndirectedMergedGraph{}, 1.0, 0), ValidationError);
}

TEST_CASE("two cliques joined by a bridge split into two leaf communities") {
  const UndirectedMergedGraph ug = two_cliques(4);
  const CommunityHierarchy h = detect_communities(ug, 1.0, 0);
  REQUIRE(h.levels[0].size() == 2);
  CHECK(h.levels[0][0].node_ids == std::set<NodeId>{0, 1, 2, 3});
  CHECK(h.levels[0][1].node_ids == std::set<NodeId>{4, 5, 6, 7});

  // Two-community partition strictly beats both one-community and singletons.
  const double two = modularity(ug, level_partition(h.levels[0]));
  const double one = modularity(ug, {ug.node_ids});
  std::vector<std::set<NodeId>> singles;
  for (NodeId id : ug.node_ids) singles.push_back({id});
  const double single = modularity(ug, singles);
  CHECK(two > one);
  CHECK(two > single);
}

TEST_CASE("every community is internally connected and partitions are valid") {
  Rng rng(71);
  for (int iter = 0; iter < 30; ++iter) {
    const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 40, 70));
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(kg));
    if (ug.node_ids.empty()) continue;
    const CommunityHierarchy h = detect_communities(ug, 1.0, iter);
    REQUIRE(h.depth() >= 1);
    for (const auto& level : h.levels) {
      check_partition_covers(level, ug.node_ids);
      for (const auto& c : level) check_connected(ug, c.node_ids);
    }
  }
}

TEST_CASE("hierarchy nesting: each community maps into one parent") {
  Rng rng(83);
  for (int iter = 0; iter < 20; ++iter) {
    const UndirectedMergedGraph ug = test::to_merged(test::random_connected_graph(rng, 30, 6));
    const CommunityHierarchy h = detect_communities(ug, 1.0, iter);
    for (std::size_t lvl = 0; lvl + 1 < h.depth(); ++lvl) {
      for (const auto& c : h.levels[lvl]) {
        REQUIRE(c.parent >= 0);
        REQUIRE(static_cast<std::size_t>(c.parent) < h.levels[lvl + 1].size());
        const auto& parent = h.levels[lvl + 1][static_cast<std::size_t>(c.parent)];
        CHECK(std::includes(parent.node_ids.begin(), parent.node_ids.end(),
                            c.node_ids.begin(), c.node_ids.end()));
      }
    }
    if (h.depth() > 1) {
      CHECK(h.levels[h.depth() - 1].size() <= h.levels[0].size());
    }
    CHECK(h.depth() <= 4);
  }
}

TEST_CASE("leaf modularity is at least the singleton partition's") {
  Rng rng(97);
  for (int iter = 0; iter < 30; ++iter) {
    const KnowledgeGraph kg = test::to_kg(test::random_digraph(rng, 30, 50));
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(kg));
    if (ug.node_ids.empty()) continue;
    const CommunityHierarchy h = detect_communities(ug, 1.0, iter);
    std::vector<std::set<NodeId>> singles;
    for (NodeId id : ug.node_ids) singles.push_back({id});
    CHECK(modularity(ug, level_partition(h.levels[0])) >=
          modularity(ug, singles) - 1e-12);
  }
}

TEST_CASE("detection is deterministic for a fixed seed") {
  const UndirectedMergedGraph ug = two_cliques(5);
  const CommunityHierarchy a = detect_communities(ug, 1.0, 42);
  const CommunityHierarchy b = detect_communities(ug, 1.0, 42);
  REQUIRE(a.depth() == b.depth());
  for (std::size_t lvl = 0; lvl < a.depth(); ++lvl) {
    REQUIRE(a.levels[lvl].size() == b.levels[lvl].size());
    for (std::size_t c = 0; c < a.levels[lvl].size(); ++c) {
      CHECK(a.levels[lvl][c].node_ids == b.levels[lvl][c].node_ids);
      CHECK(a.levels[lvl][c].parent == b.levels[lvl][c].parent);
    }
  }
}

TEST_CASE("summarize_leaf lists nodes by descending degree under budget") {
  KnowledgeGraph kg;
  // Star K1,3 centered at H.
  kg.merge_triplet(Triplet{"H", RelationType::kHasCause, "X"});
  kg.merge_triplet(Triplet{"H", RelationType::kHasCause, "Y"});
  kg.merge_triplet(Triplet{"H", RelationType::kPartOf, "Z"});
  const UndirectedMergedGraph ug = to_undirected(full_subgraph(kg));

  SUBCASE("star center comes first") {
    const std::string s = summarize_leaf(ug.node_ids, ug, kg, 400);
    CHECK(s.rfind("H (", 0) == 0);
    CHECK(s.find("HAS CAUSE") != std::string::npos);
  }
  SUBCASE("singleton community is the surface alone") {
    KnowledgeGraph solo;
    const NodeId id = solo.intern_node("LONE NODE");
    UndirectedMergedGraph empty_ug;
    empty_ug.node_ids = {id};
    CHECK(summarize_leaf({id}, empty_ug, solo, 400) == "LONE NODE");
  }
  SUBCASE("budget bounds the output") {
    for (std::size_t budget : {10, 25, 80}) {
      const std::string s = summarize_leaf(ug.node_ids, ug, kg, budget);
      CHECK(s.size() <= budget);
      CHECK(!s.empty());
    }
  }
  SUBCASE("empty community is an error") {
    CHECK_THROWS_AS(summarize_leaf({}, ug, kg, 100), ValidationError);
  }
}

TEST_CASE("summarize_parent concatenates children in order within budget") {
  SUBCASE("single short child is unchanged") {
    CHECK(summarize_parent({"Engines overheat."}, 100) == "Engines overheat.");
  }
  SUBCASE("over-budget output is truncated to the budget") {
    const std::string s =
        summarize_parent({"First sentence about pumps.", "Second sentence about valves."}, 40);
    CHECK(s.size() <= 40);
    CHECK(s == "First sentence about pumps.");  // sentence-boundary cut
  }
  SUBCASE("children appear in child order") {
    const std::string s = summarize_parent({"AAA.", "BBB.", "CCC."}, 100);
    CHECK(s.find("AAA") < s.find("BBB"));
    CHECK(s.find("BBB") < s.find("CCC"));
  }
  SUBCASE("no children is an error") {
    CHECK_THROWS_AS(summarize_parent({}, 100), ValidationError);
  }
}

TEST_CASE("summarize_hierarchy fills every level deterministically") {
  const UndirectedMergedGraph ug = two_cliques(5);
  KnowledgeGraph kg;
  for (int i = 0; i < 10; ++i) kg.intern_node("NODE " + std::to_string(i));
  CommunityHierarchy h = detect_communities(ug, 1.0, 0);
  summarize_hierarchy(h, ug, kg, 400, 600);
  for (const auto& level : h.levels) {
    for (const auto& c : level) CHECK(!c.summary.empty());
  }
  CommunityHierarchy h2 = detect_communities(ug, 1.0, 0);
  summarize_hierarchy(h2, ug, kg, 400, 600);
  for (std::size_t lvl = 0; lvl < h.depth(); ++lvl) {
    for (std::size_t c = 0; c < h.levels[lvl].size(); ++c) {
      CHECK(h.levels[lvl][c].summary == h2.levels[lvl][c].summary);
    }
  }
}

TEST_CASE("assemble_context composes summaries, separator, and traversal") {
  CommunityHierarchy empty;
  SUBCASE("empty hierarchy passes traversal through") {
    CHECK(assemble_context("X -[R (w=1)]- Y", empty, {400, 600}, 6000) == "X -[R (w=1)]- Y");
  }
  SUBCASE("empty traversal keeps summaries and separator") {
    CommunityHierarchy h;
    h.levels.push_back({Community{{0}, -1, "THE SUMMARY"}});
    const std::string ctx = assemble_context("", h, {400, 600}, 6000);
    CHECK(ctx == "THE SUMMARY\n---\n");
  }
  SUBCASE("deterministic across invocations") {
    CommunityHierarchy h;
    h.levels.push_back({Community{{0}, 0, "LEAF A"}, Community{{1}, 0, "LEAF B"}});
    h.levels.push_back({Community{{0, 1}, -1, "PARENT"}});
    const std::string a = assemble_context("T", h, {400, 600}, 6000);
    CHECK(a == assemble_context("T", h, {400, 600}, 6000));
    // Top level first, then leaves, then the separator and traversal.
    CHECK(a.find("PARENT") < a.find("LEAF A"));
    CHECK(a.find("LEAF A") < a.find("LEAF B"));
    CHECK(a.find("---") > a.find("LEAF B"));
    CHECK(a.back() == 'T');
  }
  SUBCASE("total budget clips the result") {
    CommunityHierarchy h;
    h.levels.push_back({Community{{0}, -1, std::string(300, 'S')}});
    const std::string ctx = assemble_context(std::string(300, 'T'), h, {400, 600}, 100);
    CHECK(ctx.size() == 100);
  }
}
