#pragma once

#include <limits>
#include <tuple>

#include "uavcgan/convergence/probability.hpp"
#include "uavcgan/topology/ring.hpp"

namespace uavcgan::convergence {

/// Everything except the graph-derived quantities of ConvergenceParams.
struct DesignObjective {
  double eta = 0.5;
  double training_error = 0.01;
  GammaSchedule gamma;
  double target_probability = 0.99;
  int horizon = 200;  // tie-break when no candidate reaches the target
};

struct DesignChoice {
  topology::NetworkGraph graph{0, 0};
  int links = 0;
  int iterations_to_target = -1;  // -1: target not reached
  double probability_at_horizon = 0.0;
};

inline DesignChoice evaluate_design(const topology::NetworkGraph& graph, const DesignObjective& obj) {
  DesignChoice d;
  d.graph = graph;
  d.links = static_cast<int>(graph.num_edges());
  const auto p = ConvergenceParams::from_graph(graph, obj.eta, obj.training_error, obj.gamma, obj.target_probability);
  d.probability_at_horizon = cumulative_convergence_prob(p, obj.horizon);
  try {
    d.iterations_to_target = iterations_for_target(p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TargetUnreachable) throw;
  }
  return d;
}

/// Uses at most `budget` links: augments the ring to every link count from G to `budget` and keeps
/// the graph reaching the target in the fewest iterations (then highest probability at the
/// horizon, then fewest links). A larger budget can therefore never slow convergence.
inline DesignChoice design_topology(const topology::NetworkGraph& ring, const topology::FeasibleSets& sets,
                                    int budget, const DesignObjective& obj) {
  const int n = ring.num_nodes();
  require(budget >= n, ErrorKind::InsufficientResourceBlocks,
          "budget " + std::to_string(budget) + " below fleet size " + std::to_string(n));
  auto key = [](const DesignChoice& d) {
    const int it = d.iterations_to_target < 0 ? std::numeric_limits<int>::max() : d.iterations_to_target;
    return std::make_tuple(it, -d.probability_at_horizon, d.links);
  };
  DesignChoice best = evaluate_design(ring, obj);
  int last_links = n;
  for (int b = n + 1; b <= budget; ++b) {
    auto g = topology::augment_and_prune(ring, sets, b);
    // Power budgets can cap the link count below b; further budgets then repeat the same graph.
    if (static_cast<int>(g.num_edges()) == last_links) continue;
    last_links = static_cast<int>(g.num_edges());
    auto d = evaluate_design(g, obj);
    if (key(d) < key(best)) best = std::move(d);
  }
  best.graph.set_resource_blocks(budget);
  return best;
}

}  // namespace uavcgan::convergence
