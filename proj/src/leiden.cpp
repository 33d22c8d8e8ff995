#include "keo/leiden.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <numeric>
#include <tuple>

namespace keo::detail {

namespace {
constexpr double kEps = 1e-12;
}

LeidenGraph LeidenGraph::from_edges(std::size_t n,
                                    const std::vector<std::tuple<int, int, double>>& edges) {
  LeidenGraph g;
  g.n = n;
  g.adj.assign(n, {});
  g.self_loop.assign(n, 0.0);
  // Accumulate parallel edges so adjacency holds one entry per neighbor.
  std::map<std::pair<int, int>, double> acc;
  for (const auto& [u, v, w] : edges) {
    if (u == v) {
      g.self_loop[static_cast<std::size_t>(u)] += w;
    } else {
      acc[{std::min(u, v), std::max(u, v)}] += w;
    }
  }
  for (const auto& [pair, w] : acc) {
    g.adj[static_cast<std::size_t>(pair.first)].push_back({pair.second, w});
    g.adj[static_cast<std::size_t>(pair.second)].push_back({pair.first, w});
  }
  g.strength.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 2.0 * g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) s += w;
    g.strength[i] = s;
    g.two_m += s;
  }
  return g;
}

namespace {

// Mutable partition bookkeeping shared by the moving and refinement phases.
struct Partition {
  std::vector<int> community;       // per node
  std::vector<double> total;        // strength per community
  std::vector<int> size;            // node count per community

  static Partition singletons(const LeidenGraph& g) {
    Partition p;
    p.community.resize(g.n);
    std::iota(p.community.begin(), p.community.end(), 0);
    p.total = g.strength;
    p.size.assign(g.n, 1);
    return p;
  }

  void move(const LeidenGraph& g, int v, int to) {
    const int from = community[static_cast<std::size_t>(v)];
    if (from == to) return;
    total[static_cast<std::size_t>(from)] -= g.strength[static_cast<std::size_t>(v)];
    size[static_cast<std::size_t>(from)] -= 1;
    total[static_cast<std::size_t>(to)] += g.strength[static_cast<std::size_t>(v)];
    size[static_cast<std::size_t>(to)] += 1;
    community[static_cast<std::size_t>(v)] = to;
  }
};

// Queue-driven local moving. Returns true if any node changed community.
bool local_move(const LeidenGraph& g, Partition& p, double gamma, Rng& rng) {
  if (g.two_m <= 0.0) return false;
  std::vector<int> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::deque<int> queue(order.begin(), order.end());
  std::vector<char> queued(g.n, 1);
  std::vector<double> weight_to(g.n, 0.0);  // scratch: edge weight v -> community
  bool moved_any = false;

  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    queued[static_cast<std::size_t>(v)] = 0;

    const int own = p.community[static_cast<std::size_t>(v)];
    std::vector<int> candidates;
    for (const auto& [u, w] : g.adj[static_cast<std::size_t>(v)]) {
      const int c = p.community[static_cast<std::size_t>(u)];
      if (weight_to[static_cast<std::size_t>(c)] == 0.0) candidates.push_back(c);
      weight_to[static_cast<std::size_t>(c)] += w;
    }

    const double kv = g.strength[static_cast<std::size_t>(v)];
    auto gain = [&](int c) {
      const double tot =
          p.total[static_cast<std::size_t>(c)] - (c == own ? kv : 0.0);
      return weight_to[static_cast<std::size_t>(c)] - gamma * tot * kv / g.two_m;
    };

    const double stay = gain(own);
    std::sort(candidates.begin(), candidates.end());
    int best = own;
    double best_gain = stay;
    for (int c : candidates) {
      if (c == own) continue;
      const double gc = gain(c);
      if (gc > best_gain + kEps) {
        best_gain = gc;
        best = c;
      }
    }
    // Splitting off into an empty community can pay when the node is a net
    // drag on its current one.
    if (own >= 0 && p.size[static_cast<std::size_t>(own)] > 1 && 0.0 > best_gain + kEps) {
      for (std::size_t c = 0; c < p.size.size(); ++c) {
        if (p.size[c] == 0) {
          best = static_cast<int>(c);
          best_gain = 0.0;
          break;
        }
      }
    }

    for (int c : candidates) weight_to[static_cast<std::size_t>(c)] = 0.0;

    if (best != own) {
      p.move(g, v, best);
      moved_any = true;
      for (const auto& [u, w] : g.adj[static_cast<std::size_t>(v)]) {
        if (p.community[static_cast<std::size_t>(u)] != best &&
            !queued[static_cast<std::size_t>(u)]) {
          queue.push_back(u);
          queued[static_cast<std::size_t>(u)] = 1;
        }
      }
    }
  }
  return moved_any;
}

// Refinement: within each community of p, grow sub-communities from
// singletons. Only well-connected nodes merge, and only into well-connected
// sub-communities, which is what makes the final communities connected.
std::vector<int> refine(const LeidenGraph& g, const Partition& p, double gamma, Rng& rng) {
  std::vector<int> sub(g.n);
  std::iota(sub.begin(), sub.end(), 0);
  if (g.two_m <= 0.0) return sub;

  std::vector<double> sub_total = g.strength;
  std::vector<int> sub_size(g.n, 1);
  // Edge weight from each node/sub-community to the rest of its community.
  std::vector<double> node_to_comm(g.n, 0.0);
  std::vector<double> sub_to_comm(g.n, 0.0);
  for (std::size_t v = 0; v < g.n; ++v) {
    for (const auto& [u, w] : g.adj[v]) {
      if (p.community[v] == p.community[static_cast<std::size_t>(u)]) node_to_comm[v] += w;
    }
    sub_to_comm[v] = node_to_comm[v];
  }

  std::vector<int> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> weight_to(g.n, 0.0);
  for (const int v : order) {
    if (sub_size[static_cast<std::size_t>(sub[static_cast<std::size_t>(v)])] != 1) continue;
    const int comm = p.community[static_cast<std::size_t>(v)];
    const double comm_total = p.total[static_cast<std::size_t>(comm)];
    const double kv = g.strength[static_cast<std::size_t>(v)];

    // Well-connectedness of the node within its community.
    if (node_to_comm[static_cast<std::size_t>(v)] <
        gamma * kv * (comm_total - kv) / g.two_m - kEps) {
      continue;
    }

    std::vector<int> candidates;
    for (const auto& [u, w] : g.adj[static_cast<std::size_t>(v)]) {
      if (p.community[static_cast<std::size_t>(u)] != comm) continue;
      const int s = sub[static_cast<std::size_t>(u)];
      if (weight_to[static_cast<std::size_t>(s)] == 0.0) candidates.push_back(s);
      weight_to[static_cast<std::size_t>(s)] += w;
    }
    std::sort(candidates.begin(), candidates.end());

    const int own = sub[static_cast<std::size_t>(v)];
    int best = own;
    double best_gain = 0.0;
    for (int s : candidates) {
      if (s == own) continue;
      const double s_total = sub_total[static_cast<std::size_t>(s)];
      // Only merge into sub-communities that are themselves well connected.
      if (sub_to_comm[static_cast<std::size_t>(s)] <
          gamma * s_total * (comm_total - s_total) / g.two_m - kEps) {
        continue;
      }
      const double gc =
          weight_to[static_cast<std::size_t>(s)] - gamma * s_total * kv / g.two_m;
      if (gc > best_gain + kEps) {
        best_gain = gc;
        best = s;
      }
    }

    if (best != own) {
      // v is a singleton: fold it into best and retire its own slot.
      sub[static_cast<std::size_t>(v)] = best;
      sub_total[static_cast<std::size_t>(best)] += kv;
      sub_size[static_cast<std::size_t>(best)] += 1;
      sub_total[static_cast<std::size_t>(own)] = 0.0;
      sub_size[static_cast<std::size_t>(own)] = 0;
      // 2 * internal edge weight leaves the boundary of best.
      sub_to_comm[static_cast<std::size_t>(best)] +=
          node_to_comm[static_cast<std::size_t>(v)] -
          2.0 * weight_to[static_cast<std::size_t>(best)];
    }
    for (int s : candidates) weight_to[static_cast<std::size_t>(s)] = 0.0;
  }
  return sub;
}

struct Aggregated {
  LeidenGraph graph;
  std::vector<int> node_of;   // original-node -> aggregate-node
  std::vector<int> init_comm; // aggregate-node -> community id in the coarse partition
};

Aggregated aggregate(const LeidenGraph& g, const std::vector<int>& sub, const Partition& p) {
  // Renumber sub-communities densely in order of their smallest member.
  std::vector<int> remap(g.n, -1);
  int next = 0;
  std::vector<int> node_of(g.n);
  for (std::size_t v = 0; v < g.n; ++v) {
    const int s = sub[v];
    if (remap[static_cast<std::size_t>(s)] < 0) remap[static_cast<std::size_t>(s)] = next++;
    node_of[v] = remap[static_cast<std::size_t>(s)];
  }

  std::vector<std::tuple<int, int, double>> edges;
  for (std::size_t v = 0; v < g.n; ++v) {
    const int av = node_of[v];
    if (g.self_loop[v] != 0.0) edges.emplace_back(av, av, g.self_loop[v]);
    for (const auto& [u, w] : g.adj[v]) {
      if (static_cast<std::size_t>(u) < v) continue;  // each undirected edge once
      edges.emplace_back(av, node_of[static_cast<std::size_t>(u)], w);
    }
  }

  Aggregated out;
  out.graph = LeidenGraph::from_edges(static_cast<std::size_t>(next), edges);
  out.node_of = std::move(node_of);
  out.init_comm.assign(static_cast<std::size_t>(next), -1);
  for (std::size_t v = 0; v < g.n; ++v) {
    out.init_comm[static_cast<std::size_t>(out.node_of[v])] = p.community[v];
  }
  return out;
}

std::vector<int> renumber_by_smallest_member(const std::vector<int>& community) {
  std::map<int, int> remap;
  std::vector<int> out(community.size());
  int next = 0;
  for (std::size_t v = 0; v < community.size(); ++v) {
    auto [it, inserted] = remap.emplace(community[v], next);
    if (inserted) ++next;
    out[v] = it->second;
  }
  return out;
}

int count_communities(const std::vector<int>& community) {
  int mx = -1;
  for (int c : community) mx = std::max(mx, c);
  return mx + 1;
}

// Safety net for the connectivity invariant: split any community that is not
// internally connected into its connected parts (never decreases modularity).
std::vector<int> split_disconnected(const LeidenGraph& g, std::vector<int> community) {
  const int n_comm = count_communities(community);
  std::vector<char> seen(g.n, 0);
  int next = n_comm;
  for (std::size_t start = 0; start < g.n; ++start) {
    if (seen[start]) continue;
    // BFS within the community of `start`.
    const int c = community[start];
    std::vector<std::size_t> frontier{start};
    std::vector<std::size_t> members;
    seen[start] = 1;
    while (!frontier.empty()) {
      const std::size_t v = frontier.back();
      frontier.pop_back();
      members.push_back(v);
      for (const auto& [u, w] : g.adj[v]) {
        const auto uu = static_cast<std::size_t>(u);
        if (!seen[uu] && community[uu] == c) {
          seen[uu] = 1;
          frontier.push_back(uu);
        }
      }
    }
    // First BFS island of a community keeps its id; later islands get new ids.
    bool is_first = true;
    for (std::size_t v = 0; v < start; ++v) {
      if (community[v] == c) {
        is_first = false;
        break;
      }
    }
    if (!is_first) {
      for (std::size_t v : members) community[v] = next;
      ++next;
    }
  }
  return renumber_by_smallest_member(community);
}

}  // namespace

std::vector<int> leiden_communities(const LeidenGraph& input, double gamma, std::uint64_t seed) {
  Rng rng(seed);
  LeidenGraph g = input;
  Partition p = Partition::singletons(g);
  // members[a] = original nodes inside aggregate node a.
  std::vector<std::vector<int>> members(g.n);
  for (std::size_t v = 0; v < g.n; ++v) members[v] = {static_cast<int>(v)};

  while (true) {
    local_move(g, p, gamma, rng);
    const int n_comm = count_communities(renumber_by_smallest_member(p.community));
    if (static_cast<std::size_t>(n_comm) == g.n) break;  // fully aggregated

    const std::vector<int> sub = refine(g, p, gamma, rng);
    const Aggregated agg = aggregate(g, sub, p);
    if (agg.graph.n == g.n) break;  // refinement found nothing to merge

    std::vector<std::vector<int>> new_members(agg.graph.n);
    for (std::size_t v = 0; v < g.n; ++v) {
      auto& dst = new_members[static_cast<std::size_t>(agg.node_of[v])];
      dst.insert(dst.end(), members[v].begin(), members[v].end());
    }
    members = std::move(new_members);
    g = agg.graph;
    p.community = renumber_by_smallest_member(agg.init_comm);
    p.total.assign(g.n, 0.0);
    p.size.assign(g.n, 0);
    for (std::size_t v = 0; v < g.n; ++v) {
      p.total[static_cast<std::size_t>(p.community[v])] += g.strength[v];
      p.size[static_cast<std::size_t>(p.community[v])] += 1;
    }
  }

  std::vector<int> result(input.n, -1);
  for (std::size_t a = 0; a < g.n; ++a) {
    for (int orig : members[a]) {
      result[static_cast<std::size_t>(orig)] = p.community[a];
    }
  }
  result = renumber_by_smallest_member(result);
  return split_disconnected(input, std::move(result));
}

double leiden_modularity(const LeidenGraph& g, const std::vector<int>& community, double gamma) {
  if (g.two_m <= 0.0) return 0.0;
  const int n_comm = count_communities(community);
  std::vector<double> internal(static_cast<std::size_t>(n_comm), 0.0);
  std::vector<double> total(static_cast<std::size_t>(n_comm), 0.0);
  for (std::size_t v = 0; v < g.n; ++v) {
    const auto c = static_cast<std::size_t>(community[v]);
    total[c] += g.strength[v];
    internal[c] += 2.0 * g.self_loop[v];
    for (const auto& [u, w] : g.adj[v]) {
      if (community[static_cast<std::size_t>(u)] == community[v]) internal[c] += w;
    }
  }
  double q = 0.0;
  for (int c = 0; c < n_comm; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    q += internal[cc] / g.two_m - gamma * (total[cc] / g.two_m) * (total[cc] / g.two_m);
  }
  return q;
}

}  // namespace keo::detail
