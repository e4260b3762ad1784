#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "uavcgan/core/csv.hpp"
#include "uavcgan/topology/feasible.hpp"
#include "uavcgan/topology/graph.hpp"

namespace uavcgan::topology {

inline constexpr const char* kEdgeHeader = "src,dst,tx_power_dbm,path_loss_db,rate_bps";

inline std::string edges_to_csv(const NetworkGraph& graph) {
  std::string text = std::string(kEdgeHeader) + "\n";
  auto edges = graph.edges();
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.src, a.dst) < std::pair(b.src, b.dst); });
  for (const auto& e : edges) {
    csv::Row row;
    row << e.src << e.dst << e.budget.tx_power_dbm << e.budget.path_loss_db << e.rate_bps;
    text += row.str() + "\n";
  }
  return text;
}

/// Rebuilds a graph from an edge list; noise, bandwidth and thresholds come from `params`.
inline NetworkGraph edges_from_csv(const std::string& text, int num_nodes, int resource_blocks,
                                   const LinkParameters& params) {
  const auto table = csv::parse_table(text);
  NetworkGraph graph(num_nodes, resource_blocks);
  for (const auto& r : table.rows) {
    LinkBudget b{csv::parse_double(r[2]), csv::parse_double(r[3]), params.noise_power_dbm(), params.bandwidth_hz,
                 params.snr_threshold_db, params.share_deadline_s};
    graph.add_edge(Edge{static_cast<NodeId>(csv::parse_int(r[0])), static_cast<NodeId>(csv::parse_int(r[1])), b,
                        csv::parse_double(r[4])});
  }
  return graph;
}

/// {"l_max": .., "l_loop_min": {"0": .., ...}, "num_edges": ..}
inline nlohmann::ordered_json topology_summary(const NetworkGraph& graph) {
  nlohmann::ordered_json j;
  j["l_max"] = max_shortest_path(graph);
  nlohmann::ordered_json loops = nlohmann::ordered_json::object();
  for (NodeId g = 0; g < graph.num_nodes(); ++g) loops[std::to_string(g)] = min_loop(graph, g);
  j["l_loop_min"] = loops;
  j["num_edges"] = graph.num_edges();
  return j;
}

}  // namespace uavcgan::topology
