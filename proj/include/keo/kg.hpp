#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "keo/relation.hpp"

namespace keo {

using NodeId = std::int64_t;

struct EntityNode {
  NodeId id = 0;
  std::string surface;              // canonicalized
  std::set<std::string> provenance; // record ids where mentioned
  std::uint64_t last_touch = 0;     // recency counter for prompt node hints
};

struct EdgeKey {
  NodeId head = 0;
  RelationType relation = RelationType::kOwnedBy;
  NodeId tail = 0;

  auto operator<=>(const EdgeKey&) const = default;
};

struct DirectedEdge {
  NodeId head = 0;
  NodeId tail = 0;
  RelationType relation = RelationType::kOwnedBy;
  std::uint64_t weight = 1;  // occurrence count of <head, relation, tail>
};

struct Triplet {
  std::string head;  // surface text, canonicalized by the parser
  RelationType relation = RelationType::kOwnedBy;
  std::string tail;
};

// Weighted, directed, multi-relational entity graph. Single writer during
// construction; immutable once built, so shared concurrent reads are safe.
class KnowledgeGraph {
public:
  // Returns the node id, creating the node when the canonicalized surface is
  // new. record_id, when given, is added to the node's provenance.
  NodeId intern_node(std::string_view surface,
                     const std::optional<std::string>& record_id = std::nullopt);

  // Creates endpoints if absent, then increments the (h, r, t) edge weight.
  void merge_triplet(const Triplet& t,
                     const std::optional<std::string>& record_id = std::nullopt);

  std::optional<NodeId> find_node(std::string_view surface) const;
  bool has_node(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }
  const EntityNode& node(NodeId id) const;
  const std::vector<EntityNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, std::uint64_t>& edges() const { return edges_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint64_t total_weight() const;

  std::uint64_t record_count() const { return record_count_; }
  void set_record_count(std::uint64_t n) { record_count_ = n; }

  // Node surfaces ordered most-recently-touched first (for prompt hints).
  std::vector<std::string> surfaces_by_recency() const;

  // Undirected adjacency over edge endpoints, self-loops excluded.
  std::vector<std::vector<NodeId>> undirected_adjacency() const;

  // Equality under (node surface set, edge key by surface, weight); ids and
  // provenance are excluded, matching the persistence round-trip contract.
  bool same_content(const KnowledgeGraph& other) const;

private:
  std::vector<EntityNode> nodes_;
  std::map<std::string, NodeId> by_surface_;
  std::map<EdgeKey, std::uint64_t> edges_;
  std::uint64_t record_count_ = 0;
  std::uint64_t touch_counter_ = 0;
};

// Line-oriented text persistence:
//   keo-kg 1
//   records <count>
//   nodes <count>
//   <id>\t<surface>            (one per node)
//   edges <count>
//   <head>\t<relation>\t<tail>\t<weight>
// Counts make truncation detectable; load never returns a partial graph.
void save_kg(const KnowledgeGraph& g, const std::string& path);
KnowledgeGraph load_kg(const std::string& path);

std::string serialize_kg(const KnowledgeGraph& g);
KnowledgeGraph deserialize_kg(const std::string& text);

}  // namespace keo
