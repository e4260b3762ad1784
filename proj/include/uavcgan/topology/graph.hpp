#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "uavcgan/core/error.hpp"
#include "uavcgan/topology/link.hpp"

namespace uavcgan::topology {

using NodeId = int;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  LinkBudget budget;
  double rate_bps = 0.0;
};

/// Directed sharing graph over nodes 0..G-1. Every stored edge meets its SNR threshold
/// and the edge count never exceeds the resource-block budget.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(int num_nodes, int resource_blocks) : num_nodes_(num_nodes), resource_blocks_(resource_blocks) {
    require(num_nodes >= 0, ErrorKind::InvalidArgument, "negative node count");
  }

  int num_nodes() const { return num_nodes_; }
  int resource_blocks() const { return resource_blocks_; }
  void set_resource_blocks(int blocks) {
    require(static_cast<int>(edges_.size()) <= blocks, ErrorKind::InsufficientResourceBlocks,
            "graph already uses " + std::to_string(edges_.size()) + " blocks");
    resource_blocks_ = blocks;
  }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  bool has_edge(NodeId src, NodeId dst) const { return find(src, dst) != edges_.end(); }

  const Edge& edge(NodeId src, NodeId dst) const {
    auto it = find(src, dst);
    require(it != edges_.end(), ErrorKind::InvalidArgument, "no such edge");
    return *it;
  }

  void add_edge(const Edge& e) {
    require(e.src >= 0 && e.src < num_nodes_ && e.dst >= 0 && e.dst < num_nodes_ && e.src != e.dst,
            ErrorKind::InvalidArgument, "edge endpoints out of range");
    require(!has_edge(e.src, e.dst), ErrorKind::InvalidArgument, "duplicate edge");
    require(e.budget.meets_threshold(), ErrorKind::InvalidArgument, "edge below SNR threshold");
    require(static_cast<int>(edges_.size()) < resource_blocks_, ErrorKind::InsufficientResourceBlocks,
            "edge count would exceed resource blocks");
    edges_.push_back(e);
  }

  void remove_edge(NodeId src, NodeId dst) {
    auto it = find(src, dst);
    require(it != edges_.end(), ErrorKind::InvalidArgument, "no such edge");
    edges_.erase(it);
  }

  /// Sorted out-neighbours (Q_g).
  std::vector<NodeId> out_neighbors(NodeId g) const {
    std::vector<NodeId> out;
    for (const auto& e : edges_)
      if (e.src == g) out.push_back(e.dst);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Sorted in-neighbours (C_g).
  std::vector<NodeId> in_neighbors(NodeId g) const {
    std::vector<NodeId> in;
    for (const auto& e : edges_)
      if (e.dst == g) in.push_back(e.src);
    std::sort(in.begin(), in.end());
    return in;
  }

  std::vector<std::vector<NodeId>> adjacency() const {
    std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(num_nodes_));
    for (const auto& e : edges_) adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  int max_in_degree() const {
    int best = 0;
    for (NodeId g = 0; g < num_nodes_; ++g) best = std::max(best, static_cast<int>(in_neighbors(g).size()));
    return best;
  }

 private:
  std::vector<Edge>::const_iterator find(NodeId src, NodeId dst) const {
    return std::find_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.src == src && e.dst == dst; });
  }

  int num_nodes_ = 0;
  int resource_blocks_ = 0;
  std::vector<Edge> edges_;
};

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// BFS hop counts from `source`; unreachable nodes get kUnreachable.
inline std::vector<int> hop_distances(const std::vector<std::vector<NodeId>>& adj, NodeId source) {
  std::vector<int> dist(adj.size(), kUnreachable);
  std::queue<NodeId> frontier;
  dist[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId x = frontier.front();
    frontier.pop();
    for (NodeId y : adj[static_cast<std::size_t>(x)]) {
      if (dist[static_cast<std::size_t>(y)] == kUnreachable) {
        dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
        frontier.push(y);
      }
    }
  }
  return dist;
}

inline bool is_strongly_connected(const NetworkGraph& graph) {
  const auto adj = graph.adjacency();
  for (NodeId g = 0; g < graph.num_nodes(); ++g) {
    for (int d : hop_distances(adj, g))
      if (d == kUnreachable) return false;
  }
  return true;
}

namespace detail {
inline int max_shortest_path(const std::vector<std::vector<NodeId>>& adj) {
  int best = 0;
  for (NodeId g = 0; g < static_cast<NodeId>(adj.size()); ++g) {
    for (int d : hop_distances(adj, g)) {
      if (d == kUnreachable) fail(ErrorKind::NotStronglyConnected, "graph is not strongly connected");
      best = std::max(best, d);
    }
  }
  return best;
}
}  // namespace detail

/// l_max: the largest BFS hop count over ordered node pairs.
inline int max_shortest_path(const NetworkGraph& graph) { return detail::max_shortest_path(graph.adjacency()); }

/// l_loop^min for one node: the shortest directed cycle through it.
inline int min_loop(const NetworkGraph& graph, NodeId node) {
  require(node >= 0 && node < graph.num_nodes(), ErrorKind::InvalidArgument, "node out of range");
  require(is_strongly_connected(graph), ErrorKind::NotStronglyConnected, "graph is not strongly connected");
  const auto adj = graph.adjacency();
  int best = kUnreachable;
  for (NodeId y : adj[static_cast<std::size_t>(node)]) {
    const int back = hop_distances(adj, y)[static_cast<std::size_t>(node)];
    if (back != kUnreachable) best = std::min(best, back + 1);
  }
  require(best != kUnreachable, ErrorKind::NotStronglyConnected, "node lies on no cycle");
  return best;
}

/// Shortest cycle through any node.
inline int girth(const NetworkGraph& graph) {
  int best = kUnreachable;
  for (NodeId g = 0; g < graph.num_nodes(); ++g) best = std::min(best, min_loop(graph, g));
  return best;
}

}  // namespace uavcgan::topology
