#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uavcgan/core/error.hpp"
#include "uavcgan/topology/graph.hpp"

namespace uavcgan::convergence {

/// Acceleration coefficient gamma(k). Equal to 1 up to the loop-closing iteration
/// k0 = l_max + l_loop_min - 1, after which it may grow linearly up to a cap.
struct GammaSchedule {
  enum class Kind { Unit, Linear, Saturating };
  Kind kind = Kind::Unit;
  double slope = 0.0;  // Linear: per-iteration increment
  double cap = 1.0;    // Linear: upper bound
  int ramp = 1;        // Saturating: iterations to reach 1 + C*eta

  static GammaSchedule unit() { return {}; }
  static GammaSchedule linear(double slope, double cap) { return {Kind::Linear, slope, cap, 1}; }
  /// Ramps linearly from 1 to the dilution factor 1 + C*eta over `ramp` iterations.
  static GammaSchedule saturating(int ramp) { return {Kind::Saturating, 0.0, 1.0, std::max(ramp, 1)}; }

  double operator()(int k, int k0, int in_degree, double eta) const {
    if (k <= k0) return 1.0;
    const double steps = static_cast<double>(k - k0);
    switch (kind) {
      case Kind::Unit: return 1.0;
      case Kind::Linear: return std::max(1.0, std::min(1.0 + slope * steps, cap));
      case Kind::Saturating: {
        const double x = in_degree * eta;
        return std::min(1.0 + x * steps / ramp, 1.0 + x);
      }
    }
    return 1.0;
  }
};

struct ConvergenceParams {
  int l_max = 1;
  int l_loop_min = 1;
  double eta = 0.5;
  int in_degree = 1;  // C
  double training_error = 0.01;
  GammaSchedule gamma;
  double target_probability = 0.99;

  int loop_iteration() const { return l_max + l_loop_min - 1; }
  double dilution() const { return 1.0 + in_degree * eta; }

  void validate() const {
    require(l_max >= 1 && l_loop_min >= 1, ErrorKind::InvalidArgument, "path lengths must be positive");
    require(eta > 0.0 && eta <= 1.0, ErrorKind::InvalidArgument, "eta must lie in (0, 1]");
    require(in_degree >= 1, ErrorKind::InvalidArgument, "in-degree must be positive");
    require(training_error >= 0.0 && training_error <= 1.0, ErrorKind::InvalidArgument,
            "training error must lie in [0, 1]");
  }

  /// l_max, shortest cycle and largest in-degree read off a strongly connected graph.
  static ConvergenceParams from_graph(const topology::NetworkGraph& graph, double eta, double training_error,
                                      GammaSchedule gamma = {}, double target = 0.99) {
    ConvergenceParams p;
    p.l_max = topology::max_shortest_path(graph);
    p.l_loop_min = topology::girth(graph);
    p.in_degree = graph.max_in_degree();
    p.eta = eta;
    p.training_error = training_error;
    p.gamma = gamma;
    p.target_probability = target;
    return p;
  }
};

/// Probability that one sample's worth of CSI from the source first reaches the farthest
/// node at `iteration`: [(1-T)eta]^l_max / (1+C eta)^(I-1), times the product of gamma(k)
/// for k past the loop-closing iteration. Zero below l_max.
inline double single_hop_arrival_prob(const ConvergenceParams& p, int iteration) {
  p.validate();
  require(iteration >= 0, ErrorKind::InvalidArgument, "iteration must be nonnegative");
  if (iteration < p.l_max) return 0.0;
  const double hop = (1.0 - p.training_error) * p.eta;
  double log_p = p.l_max * std::log(hop) - (iteration - 1) * std::log(p.dilution());
  const int k0 = p.loop_iteration();
  for (int k = k0 + 1; k <= iteration; ++k) log_p += std::log(p.gamma(k, k0, p.in_degree, p.eta));
  if (hop <= 0.0) return 0.0;
  return std::clamp(std::exp(log_p), 0.0, 1.0);
}

/// P(0..max_iteration) via P(I) = P(I-1) + (1 - P(I-1)) p_in(I).
inline std::vector<double> convergence_curve(const ConvergenceParams& p, int max_iteration) {
  p.validate();
  require(max_iteration >= 0, ErrorKind::InvalidArgument, "iteration must be nonnegative");
  std::vector<double> curve(static_cast<std::size_t>(max_iteration) + 1, 0.0);
  const double hop = (1.0 - p.training_error) * p.eta;
  const double log_dilution = std::log(p.dilution());
  const int k0 = p.loop_iteration();
  double prob = 0.0;
  double log_gamma = 0.0;
  for (int i = 1; i <= max_iteration; ++i) {
    if (i > k0) log_gamma += std::log(p.gamma(i, k0, p.in_degree, p.eta));
    if (i >= p.l_max && hop > 0.0) {
      const double p_in = std::clamp(std::exp(p.l_max * std::log(hop) - (i - 1) * log_dilution + log_gamma), 0.0, 1.0);
      prob = std::min(1.0, prob + (1.0 - prob) * p_in);  // keeps full precision while prob is tiny
    }
    curve[static_cast<std::size_t>(i)] = prob;
  }
  return curve;
}

inline double cumulative_convergence_prob(const ConvergenceParams& p, int iteration) {
  return convergence_curve(p, iteration).back();
}

/// Smallest I with P(I-1) < target <= P(I); a zero target yields the first iteration with
/// positive probability.
inline int iterations_for_target(const ConvergenceParams& p, double target, int cap = 1'000'000) {
  p.validate();
  require(target >= 0.0 && target < 1.0, ErrorKind::InvalidArgument, "target must lie in [0, 1)");
  const double hop = (1.0 - p.training_error) * p.eta;
  const double log_dilution = std::log(p.dilution());
  const int k0 = p.loop_iteration();
  double prob = 0.0;
  double log_gamma = 0.0;
  for (int i = 1; i <= cap; ++i) {
    if (i > k0) log_gamma += std::log(p.gamma(i, k0, p.in_degree, p.eta));
    if (i >= p.l_max && hop > 0.0) {
      const double p_in = std::clamp(std::exp(p.l_max * std::log(hop) - (i - 1) * log_dilution + log_gamma), 0.0, 1.0);
      prob = std::min(1.0, prob + (1.0 - prob) * p_in);
      if (prob > 0.0 && prob >= target) return i;
      // With no further gamma growth the remaining mass is a geometric tail; stop early when it cannot reach.
      if (p.gamma.kind == GammaSchedule::Kind::Unit && p_in < 1e-300) break;
    }
  }
  fail(ErrorKind::TargetUnreachable, "probability " + std::to_string(target) + " not reached within " +
                                         std::to_string(cap) + " iterations");
}

inline int iterations_for_target(const ConvergenceParams& p) { return iterations_for_target(p, p.target_probability); }

}  // namespace uavcgan::convergence
