#pragma once

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "uavcgan/core/error.hpp"
#include "uavcgan/core/random.hpp"
#include "uavcgan/topology/feasible.hpp"
#include "uavcgan/topology/graph.hpp"

namespace uavcgan::topology {

namespace detail {

struct RingSearch {
  int n;
  std::vector<std::vector<NodeId>> order;  // shuffled successors per node
  std::vector<std::vector<NodeId>> preds;
  std::vector<char> visited;
  std::vector<NodeId> path;

  bool viable(NodeId current) const {
    // Every unvisited node still needs a predecessor among {current} U unvisited and a
    // successor among {start} U unvisited.
    for (NodeId y = 0; y < n; ++y) {
      if (visited[static_cast<std::size_t>(y)]) continue;
      bool has_pred = false;
      for (NodeId p : preds[static_cast<std::size_t>(y)])
        if (p == current || !visited[static_cast<std::size_t>(p)]) { has_pred = true; break; }
      bool has_succ = false;
      for (NodeId s : order[static_cast<std::size_t>(y)])
        if (s == path.front() || !visited[static_cast<std::size_t>(s)]) { has_succ = true; break; }
      if (!has_pred || !has_succ) return false;
    }
    return true;
  }

  bool extend() {
    const NodeId current = path.back();
    if (static_cast<int>(path.size()) == n) {
      const auto& succ = order[static_cast<std::size_t>(current)];
      return std::find(succ.begin(), succ.end(), path.front()) != succ.end();
    }
    for (NodeId y : order[static_cast<std::size_t>(current)]) {
      if (visited[static_cast<std::size_t>(y)]) continue;
      visited[static_cast<std::size_t>(y)] = 1;
      path.push_back(y);
      if (viable(y) && extend()) return true;
      path.pop_back();
      visited[static_cast<std::size_t>(y)] = 0;
    }
    return false;
  }
};

}  // namespace detail

/// Directed Hamiltonian cycle over the budgeted feasible links, found by backtracking with
/// degree pruning. Ties between valid cycles are broken by the seeded successor order.
inline NetworkGraph construct_ring(const FeasibleSets& sets, Rng& rng) {
  const int n = sets.num_nodes();
  require(n >= 2, ErrorKind::DegenerateFleet, "a ring needs at least two nodes");
  require(check_necessary_condition(sets), ErrorKind::NoFeasibleTopology,
          "feasible sets are empty for some node or do not cover the fleet");

  detail::RingSearch search{n, {}, std::vector<std::vector<NodeId>>(static_cast<std::size_t>(n)),
                            std::vector<char>(static_cast<std::size_t>(n), 0), {}};
  for (NodeId g = 0; g < n; ++g) {
    std::vector<NodeId> succ(sets.budgeted[static_cast<std::size_t>(g)].begin(),
                             sets.budgeted[static_cast<std::size_t>(g)].end());
    std::shuffle(succ.begin(), succ.end(), rng);
    for (NodeId j : succ) search.preds[static_cast<std::size_t>(j)].push_back(g);
    search.order.push_back(std::move(succ));
  }
  search.path.push_back(0);
  search.visited[0] = 1;
  if (!search.viable(0) || !search.extend())
    fail(ErrorKind::NoFeasibleTopology, "no Hamiltonian cycle within the feasible links");

  NetworkGraph ring(n, n);
  for (std::size_t k = 0; k < search.path.size(); ++k) {
    const NodeId src = search.path[k];
    const NodeId dst = search.path[(k + 1) % search.path.size()];
    ring.add_edge(sets.candidate(src, dst));
  }
  return ring;
}

/// Per-node out-degree targets Q_g splitting `budget` blocks as evenly as possible.
inline std::vector<int> out_degree_targets(int num_nodes, int budget) {
  std::vector<int> q(static_cast<std::size_t>(num_nodes), budget / num_nodes);
  for (int g = 0; g < budget % num_nodes; ++g) ++q[static_cast<std::size_t>(g)];
  return q;
}

/// Adds every budgeted feasible link beyond the ring (fastest first, within each node's power
/// budget), then repeatedly drops the extra link whose removal raises l_max least until every
/// node is at its out-degree target. Ties prefer the lower resulting max in-degree, then the
/// slower link. Ring links are never removed, so the result stays strongly connected.
inline NetworkGraph augment_and_prune(const NetworkGraph& ring, const FeasibleSets& sets, int budget) {
  const int n = ring.num_nodes();
  require(budget >= n, ErrorKind::InsufficientResourceBlocks,
          "budget " + std::to_string(budget) + " below fleet size " + std::to_string(n));
  for (NodeId g = 0; g < n; ++g)
    require(ring.in_neighbors(g).size() == 1 && ring.out_neighbors(g).size() == 1, ErrorKind::InvalidArgument,
            "input is not a ring");
  require(is_strongly_connected(ring), ErrorKind::InvalidArgument, "input is not a ring");

  std::set<std::pair<NodeId, NodeId>> protected_edges;
  for (const auto& e : ring.edges()) protected_edges.insert({e.src, e.dst});

  NetworkGraph g(n, std::max(n * (n - 1), budget));
  for (const auto& e : ring.edges()) g.add_edge(e);

  const double cap_w = dbm_to_watts(sets.max_power_dbm) * (1.0 + 1e-12);
  for (NodeId src = 0; src < n; ++src) {
    double used_w = 0.0;
    for (const auto& e : g.edges())
      if (e.src == src) used_w += dbm_to_watts(e.budget.tx_power_dbm);
    std::vector<Edge> extra;
    for (NodeId dst : sets.budgeted[static_cast<std::size_t>(src)])
      if (!g.has_edge(src, dst)) extra.push_back(sets.candidate(src, dst));
    std::stable_sort(extra.begin(), extra.end(), [](const Edge& a, const Edge& b) { return a.rate_bps > b.rate_bps; });
    for (const auto& e : extra) {
      const double w = dbm_to_watts(e.budget.tx_power_dbm);
      if (used_w + w <= cap_w) {
        used_w += w;
        g.add_edge(e);
      }
    }
  }

  const auto targets = out_degree_targets(n, budget);
  while (true) {
    using Key = std::tuple<int, int, double, NodeId, NodeId>;
    bool found = false;
    Key best{};
    for (const auto& e : g.edges()) {
      if (protected_edges.count({e.src, e.dst})) continue;
      if (static_cast<int>(g.out_neighbors(e.src).size()) <= targets[static_cast<std::size_t>(e.src)]) continue;
      NetworkGraph trial = g;
      trial.remove_edge(e.src, e.dst);
      const Key key{max_shortest_path(trial), trial.max_in_degree(), e.rate_bps, e.src, e.dst};
      if (!found || key < best) {
        best = key;
        found = true;
      }
    }
    if (!found) break;
    g.remove_edge(std::get<3>(best), std::get<4>(best));
  }
  g.set_resource_blocks(budget);
  return g;
}

}  // namespace uavcgan::topology
