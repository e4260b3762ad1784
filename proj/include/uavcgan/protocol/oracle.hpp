#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "uavcgan/convergence/probability.hpp"
#include "uavcgan/core/random.hpp"
#include "uavcgan/topology/graph.hpp"

namespace uavcgan::protocol {

struct OracleCurve {
  std::vector<double> probability;  // index = iteration, 0..max_iterations
  std::vector<double> std_error;
  long trials = 0;
};

namespace detail {

/// Node sequence of a shortest path between the first (in id order) pair at distance l_max.
inline std::vector<topology::NodeId> farthest_path(const topology::NetworkGraph& graph) {
  const auto adj = graph.adjacency();
  const int n = graph.num_nodes();
  std::vector<topology::NodeId> best;
  for (topology::NodeId src = 0; src < n; ++src) {
    std::vector<int> dist(static_cast<std::size_t>(n), -1), parent(static_cast<std::size_t>(n), -1);
    std::queue<topology::NodeId> q;
    dist[static_cast<std::size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
      const auto x = q.front();
      q.pop();
      for (auto y : adj[static_cast<std::size_t>(x)]) {
        if (dist[static_cast<std::size_t>(y)] >= 0) continue;
        dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
        parent[static_cast<std::size_t>(y)] = x;
        q.push(y);
      }
    }
    for (topology::NodeId dst = 0; dst < n; ++dst) {
      if (dist[static_cast<std::size_t>(dst)] < 0)
        fail(ErrorKind::NotStronglyConnected, "oracle needs a strongly connected graph");
      if (dist[static_cast<std::size_t>(dst)] + 1 > static_cast<int>(best.size())) {
        best.clear();
        for (auto v = dst; v != -1; v = parent[static_cast<std::size_t>(v)]) best.push_back(v);
        std::reverse(best.begin(), best.end());
      }
    }
  }
  return best;
}

}  // namespace detail

/// Monte Carlo first-passage estimate. In iteration I a tagged unit of the source's CSI reaches
/// the farthest node if it survives every hop (probability (1-T)eta each) and the I-1 rounds of
/// dilution it spends resident: I - l_max at the source, one at each relay, each surviving with
/// probability gamma/(1 + c*eta) for that node's in-degree c. Iterations are independent attempts.
inline OracleCurve propagation_oracle(const topology::NetworkGraph& graph, double eta, double training_error,
                                      long num_trials, int max_iterations, Rng& rng,
                                      const convergence::GammaSchedule& gamma = {}) {
  require(num_trials >= 1 && max_iterations >= 0, ErrorKind::InvalidArgument, "oracle needs trials and iterations");
  require(topology::is_strongly_connected(graph), ErrorKind::NotStronglyConnected,
          "oracle needs a strongly connected graph");
  const auto path = detail::farthest_path(graph);
  const int l_max = static_cast<int>(path.size()) - 1;
  const int c_max = graph.max_in_degree();
  const int k0 = l_max + topology::girth(graph) - 1;
  const double hop = (1.0 - training_error) * eta;

  // Resident node for each dilution round j = 2..I.
  auto dilution_survival = [&](int iteration, int j) {
    const int at_source = iteration - l_max;  // rounds 2..(I - l_max + 1) at the source
    const topology::NodeId node = j <= at_source + 1 ? path.front() : path[static_cast<std::size_t>(j - at_source - 1)];
    const double c = static_cast<double>(graph.in_neighbors(node).size());
    return std::min(1.0, gamma(j, k0, c_max, eta) / (1.0 + c * eta));
  };

  std::vector<long> first_passage(static_cast<std::size_t>(max_iterations) + 1, 0);
  for (long t = 0; t < num_trials; ++t) {
    for (int i = std::max(l_max, 1); i <= max_iterations; ++i) {
      bool arrived = true;
      for (int h = 0; h < l_max && arrived; ++h) arrived = bernoulli(rng, hop);
      for (int j = 2; j <= i && arrived; ++j) arrived = bernoulli(rng, dilution_survival(i, j));
      if (arrived) {
        ++first_passage[static_cast<std::size_t>(i)];
        break;
      }
    }
  }
  OracleCurve out;
  out.trials = num_trials;
  long cum = 0;
  for (int i = 0; i <= max_iterations; ++i) {
    cum += first_passage[static_cast<std::size_t>(i)];
    const double p = static_cast<double>(cum) / static_cast<double>(num_trials);
    out.probability.push_back(p);
    out.std_error.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(num_trials)));
  }
  return out;
}

}  // namespace uavcgan::protocol
