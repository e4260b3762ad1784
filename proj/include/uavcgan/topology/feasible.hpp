#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "uavcgan/core/error.hpp"
#include "uavcgan/topology/graph.hpp"
#include "uavcgan/topology/link.hpp"

namespace uavcgan::topology {

using Position = Eigen::Vector3d;

/// Radio and sharing constants that decide whether g may feed j.
struct LinkParameters {
  double max_power_dbm = 40.0;       // P_w(max), per node across all out-links
  double link_tx_power_dbm = 30.0;   // P_w(g,j) for one link
  double noise_density_dbm_hz = -174.0;
  double bandwidth_hz = 2e6;
  double snr_threshold_db = 12.0;
  double share_deadline_s = 0.01;
  double carrier_frequency = 30e9;
  double pathloss_exponent = 2.0;
  double eta = 0.5;
  double rho = 11.0;  // payload bits per shared sample
  std::vector<double> dataset_sizes;  // H_g per node

  double noise_power_dbm() const { return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz); }
};

inline LinkBudget make_budget(const LinkParameters& p, double distance) {
  return LinkBudget{p.link_tx_power_dbm,
                    path_loss_db(distance, p.carrier_frequency, p.pathloss_exponent),
                    p.noise_power_dbm(),
                    p.bandwidth_hz,
                    p.snr_threshold_db,
                    p.share_deadline_s};
}

inline Edge make_edge(const LinkParameters& p, NodeId src, NodeId dst, double distance) {
  const auto budget = make_budget(p, distance);
  return Edge{src, dst, budget, shannon_rate(budget)};
}

/// Seconds needed to push one round of eta*H_g*rho bits over a link of `rate_bps`.
inline double share_time(const LinkParameters& p, NodeId src, double rate_bps) {
  const double h = p.dataset_sizes.empty() ? 0.0 : p.dataset_sizes.at(static_cast<std::size_t>(src));
  const double bits = p.eta * h * p.rho;
  if (bits <= 0.0) return 0.0;
  return rate_bps > 0.0 ? bits / rate_bps : std::numeric_limits<double>::infinity();
}

/// The three admission tests of one directed candidate link.
inline bool link_admissible(const LinkParameters& p, const Edge& e) {
  return e.budget.tx_power_dbm <= p.max_power_dbm && e.budget.meets_threshold() &&
         share_time(p, e.src, e.rate_bps) <= p.share_deadline_s;
}

/// S_g: every other node g can feed under the power, SNR and deadline tests.
inline std::vector<NodeId> feasible_set(NodeId node, const std::vector<Position>& positions, const LinkParameters& p) {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < static_cast<NodeId>(positions.size()); ++j) {
    if (j == node) continue;
    const double d = (positions[static_cast<std::size_t>(node)] - positions[static_cast<std::size_t>(j)]).norm();
    if (d <= 0.0) continue;
    if (link_admissible(p, make_edge(p, node, j, d))) out.push_back(j);
  }
  return out;
}

/// Per-node S_g and the power-budgeted subsets S^_g, with the candidate links behind them.
struct FeasibleSets {
  std::vector<std::set<NodeId>> full;
  std::vector<std::set<NodeId>> budgeted;
  std::map<std::pair<NodeId, NodeId>, Edge> candidates;
  double max_power_dbm = 40.0;

  int num_nodes() const { return static_cast<int>(full.size()); }

  bool union_covers_all() const {
    std::set<NodeId> seen;
    for (const auto& s : full) {
      if (s.empty()) return false;
      seen.insert(s.begin(), s.end());
    }
    return static_cast<int>(seen.size()) == num_nodes();
  }

  const Edge& candidate(NodeId src, NodeId dst) const { return candidates.at({src, dst}); }

  /// Abstract sets with identical unit links; for tests and combinatorial studies.
  static FeasibleSets from_sets(const std::vector<std::vector<NodeId>>& sets) {
    FeasibleSets fs;
    const LinkBudget unit{0.0, 0.0, -10.0, 1.0, 0.0, 1.0};
    for (NodeId g = 0; g < static_cast<NodeId>(sets.size()); ++g) {
      std::set<NodeId> s;
      for (NodeId j : sets[static_cast<std::size_t>(g)]) {
        require(j != g && j >= 0 && j < static_cast<NodeId>(sets.size()), ErrorKind::InvalidArgument,
                "feasible set member out of range");
        s.insert(j);
        fs.candidates[{g, j}] = Edge{g, j, unit, shannon_rate(unit)};
      }
      fs.full.push_back(s);
      fs.budgeted.push_back(s);
    }
    fs.max_power_dbm = std::numeric_limits<double>::infinity();
    return fs;
  }
};

/// Builds S_g for every node, then S^_g as the fastest links whose summed transmit power fits P_w(max).
inline FeasibleSets compute_feasible_sets(const std::vector<Position>& positions, const LinkParameters& p) {
  FeasibleSets fs;
  fs.max_power_dbm = p.max_power_dbm;
  const auto n = static_cast<NodeId>(positions.size());
  for (NodeId g = 0; g < n; ++g) {
    std::set<NodeId> s;
    std::vector<Edge> links;
    for (NodeId j : feasible_set(g, positions, p)) {
      const double d = (positions[static_cast<std::size_t>(g)] - positions[static_cast<std::size_t>(j)]).norm();
      const Edge e = make_edge(p, g, j, d);
      fs.candidates[{g, j}] = e;
      s.insert(j);
      links.push_back(e);
    }
    std::stable_sort(links.begin(), links.end(), [](const Edge& a, const Edge& b) { return a.rate_bps > b.rate_bps; });
    std::set<NodeId> b;
    double used_w = 0.0;
    for (const auto& e : links) {
      const double w = dbm_to_watts(e.budget.tx_power_dbm);
      if (used_w + w <= dbm_to_watts(p.max_power_dbm) * (1.0 + 1e-12)) {
        used_w += w;
        b.insert(e.dst);
      }
    }
    fs.full.push_back(std::move(s));
    fs.budgeted.push_back(std::move(b));
  }
  return fs;
}

/// Necessary condition for any feasible topology: every S_g nonempty and their union covers the fleet.
inline bool check_necessary_condition(const FeasibleSets& sets) { return sets.union_covers_all(); }

}  // namespace uavcgan::topology
