#include "keo/kg.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

NodeId KnowledgeGraph::intern_node(std::string_view surface,
                                   const std::optional<std::string>& record_id) {
  const std::string canon = canonicalize(surface);
  if (canon.empty()) throw ValidationError("entity surface is empty after canonicalization");
  NodeId id;
  auto it = by_surface_.find(canon);
  if (it == by_surface_.end()) {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(EntityNode{id, canon, {}, 0});
    by_surface_.emplace(canon, id);
  } else {
    id = it->second;
  }
  EntityNode& n = nodes_[static_cast<std::size_t>(id)];
  if (record_id) n.provenance.insert(*record_id);
  n.last_touch = ++touch_counter_;
  return id;
}

void KnowledgeGraph::merge_triplet(const Triplet& t,
                                   const std::optional<std::string>& record_id) {
  const NodeId h = intern_node(t.head, record_id);
  const NodeId tl = intern_node(t.tail, record_id);
  edges_[EdgeKey{h, t.relation, tl}] += 1;
}

std::optional<NodeId> KnowledgeGraph::find_node(std::string_view surface) const {
  auto it = by_surface_.find(canonicalize(surface));
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

const EntityNode& KnowledgeGraph::node(NodeId id) const {
  if (!has_node(id)) throw ValidationError("unknown node id " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

std::uint64_t KnowledgeGraph::total_weight() const {
  std::uint64_t total = 0;
  for (const auto& [key, w] : edges_) total += w;
  return total;
}

std::vector<std::string> KnowledgeGraph::surfaces_by_recency() const {
  std::vector<const EntityNode*> order;
  order.reserve(nodes_.size());
  for (const auto& n : nodes_) order.push_back(&n);
  std::sort(order.begin(), order.end(), [](const EntityNode* a, const EntityNode* b) {
    if (a->last_touch != b->last_touch) return a->last_touch > b->last_touch;
    return a->id < b->id;
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (const EntityNode* n : order) out.push_back(n->surface);
  return out;
}

std::vector<std::vector<NodeId>> KnowledgeGraph::undirected_adjacency() const {
  std::vector<std::set<NodeId>> nbr(nodes_.size());
  for (const auto& [key, w] : edges_) {
    if (key.head == key.tail) continue;
    nbr[static_cast<std::size_t>(key.head)].insert(key.tail);
    nbr[static_cast<std::size_t>(key.tail)].insert(key.head);
  }
  std::vector<std::vector<NodeId>> adj(nodes_.size());
  for (std::size_t i = 0; i < nbr.size(); ++i) adj[i].assign(nbr[i].begin(), nbr[i].end());
  return adj;
}

bool KnowledgeGraph::same_content(const KnowledgeGraph& other) const {
  if (nodes_.size() != other.nodes_.size() || edges_.size() != other.edges_.size()) return false;
  for (const auto& n : nodes_) {
    if (!other.find_node(n.surface)) return false;
  }
  for (const auto& [key, w] : edges_) {
    const std::string h = node(key.head).surface;
    const std::string t = node(key.tail).surface;
    auto oh = other.find_node(h);
    auto ot = other.find_node(t);
    if (!oh || !ot) return false;
    auto it = other.edges_.find(EdgeKey{*oh, key.relation, *ot});
    if (it == other.edges_.end() || it->second != w) return false;
  }
  return true;
}

std::string serialize_kg(const KnowledgeGraph& g) {
  std::ostringstream out;
  out << "keo-kg 1\n";
  out << "records " << g.record_count() << "\n";
  out << "nodes " << g.node_count() << "\n";
  for (const auto& n : g.nodes()) out << n.id << "\t" << n.surface << "\n";
  out << "edges " << g.edge_count() << "\n";
  for (const auto& [key, w] : g.edges()) {
    out << key.head << "\t" << relation_label(key.relation) << "\t" << key.tail << "\t" << w
        << "\n";
  }
  return out.str();
}

namespace {

std::uint64_t parse_u64(std::string_view s, long line, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("expected ") + what + ", got \"" + std::string(s) + "\"", line);
  }
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

KnowledgeGraph deserialize_kg(const std::string& text) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest = text;
    while (!rest.empty()) {
      std::size_t pos = rest.find('\n');
      if (pos == std::string_view::npos) {
        lines.push_back(rest);
        break;
      }
      lines.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
  }

  long ln = 0;
  auto next_line = [&]() -> std::string_view {
    if (static_cast<std::size_t>(ln) >= lines.size()) {
      throw ParseError("file truncated", ln);
    }
    return lines[static_cast<std::size_t>(ln++)];
  };

  if (next_line() != "keo-kg 1") throw ParseError("bad header, expected \"keo-kg 1\"", 1);

  auto expect_count = [&](const char* tag) -> std::uint64_t {
    const std::string_view line = next_line();
    const std::string prefix = std::string(tag) + " ";
    if (line.substr(0, prefix.size()) != prefix) {
      throw ParseError("expected \"" + std::string(tag) + " <count>\"", ln);
    }
    return parse_u64(line.substr(prefix.size()), ln, "count");
  };

  KnowledgeGraph g;
  g.set_record_count(expect_count("records"));

  const std::uint64_t node_count = expect_count("nodes");
  std::map<std::uint64_t, NodeId> id_map;
  for (std::uint64_t i = 0; i < node_count; ++i) {
    const std::string_view line = next_line();
    auto fields = split_tabs(line);
    if (fields.size() != 2) throw ParseError("node line needs <id>\\t<surface>", ln);
    const std::uint64_t file_id = parse_u64(fields[0], ln, "node id");
    if (fields[1].empty()) throw ParseError("empty node surface", ln);
    if (id_map.count(file_id)) throw ParseError("duplicate node id", ln);
    id_map[file_id] = g.intern_node(fields[1]);
  }

  const std::uint64_t edge_count = expect_count("edges");
  for (std::uint64_t i = 0; i < edge_count; ++i) {
    const std::string_view line = next_line();
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError("edge line needs <head>\\t<relation>\\t<tail>\\t<weight>", ln);
    }
    const std::uint64_t h = parse_u64(fields[0], ln, "head id");
    const std::uint64_t t = parse_u64(fields[2], ln, "tail id");
    auto rel = relation_from_label(fields[1]);
    if (!rel) throw ParseError("unknown relation \"" + std::string(fields[1]) + "\"", ln);
    const std::uint64_t w = parse_u64(fields[3], ln, "weight");
    if (w == 0) throw ParseError("edge weight must be >= 1", ln);
    auto hi = id_map.find(h);
    auto ti = id_map.find(t);
    if (hi == id_map.end() || ti == id_map.end()) {
      throw ParseError("edge references unknown node id", ln);
    }
    Triplet trip{g.node(hi->second).surface, *rel, g.node(ti->second).surface};
    for (std::uint64_t k = 0; k < w; ++k) g.merge_triplet(trip);
  }

  // Trailing blank lines are tolerated; anything else is a format error.
  while (static_cast<std::size_t>(ln) < lines.size()) {
    if (!is_blank(lines[static_cast<std::size_t>(ln)])) {
      throw ParseError("unexpected trailing content", ln + 1);
    }
    ++ln;
  }
  return g;
}

void save_kg(const KnowledgeGraph& g, const std::string& path) {
  write_file(path, serialize_kg(g));
}

KnowledgeGraph load_kg(const std::string& path) {
  return deserialize_kg(read_file(path));
}

}  // namespace keo
