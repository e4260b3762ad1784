#include <gtest/gtest.h>

#include <cmath>

#include "uavcgan/convergence/cost.hpp"
#include "uavcgan/convergence/design.hpp"
#include "uavcgan/convergence/probability.hpp"
#include "uavcgan/protocol/oracle.hpp"
#include "uavcgan/topology/ring.hpp"

using namespace uavcgan;
using namespace uavcgan::convergence;

namespace {

template <typename F>
ErrorKind kind_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::IoError;
}

ConvergenceParams ring_params(int g, double eta = 0.5, double t = 0.01) {
  ConvergenceParams p;
  p.l_max = g - 1;
  p.l_loop_min = g;
  p.eta = eta;
  p.in_degree = 1;
  p.training_error = t;
  return p;
}

topology::NetworkGraph ring_graph(int n) {
  std::vector<std::vector<topology::NodeId>> adj(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) adj[static_cast<std::size_t>(g)] = {(g + 1) % n};
  const auto fs = topology::FeasibleSets::from_sets(adj);
  topology::NetworkGraph r(n, n);
  for (int g = 0; g < n; ++g) r.add_edge(fs.candidate(g, (g + 1) % n));
  return r;
}

ConvergenceParams random_params(Rng& rng) {
  ConvergenceParams p;
  p.l_max = 1 + static_cast<int>(uniform01(rng) * 14);
  p.l_loop_min = 2 + static_cast<int>(uniform01(rng) * 14);
  p.eta = 0.01 + 0.99 * uniform01(rng);
  p.in_degree = 1 + static_cast<int>(uniform01(rng) * 6);
  p.training_error = 0.5 * uniform01(rng);
  switch (static_cast<int>(uniform01(rng) * 3)) {
    case 0: p.gamma = GammaSchedule::unit(); break;
    case 1: p.gamma = GammaSchedule::linear(0.2 * uniform01(rng), 1.0 + 2 * uniform01(rng)); break;
    default: p.gamma = GammaSchedule::saturating(1 + static_cast<int>(uniform01(rng) * 5));
  }
  return p;
}

}  // namespace

TEST(SingleHop, Examples) {
  auto p = ring_params(3);
  EXPECT_EQ(single_hop_arrival_prob(p, 1), 0.0);
  EXPECT_NEAR(single_hop_arrival_prob(p, 2), 0.495 * 0.495 / 1.5, 1e-15);
  EXPECT_NEAR(single_hop_arrival_prob(p, 2), 0.16335, 1e-5);
  // middle regime: one extra dilution per iteration
  EXPECT_NEAR(single_hop_arrival_prob(p, 4), 0.495 * 0.495 / std::pow(1.5, 3), 1e-15);
  auto dead = ring_params(3, 0.5, 1.0);
  for (int i = 0; i < 30; ++i) EXPECT_EQ(single_hop_arrival_prob(dead, i), 0.0);
}

TEST(SingleHop, GammaMultipliesPastLoopIteration) {
  auto p = ring_params(3);
  p.gamma = GammaSchedule::linear(0.1, 2.0);
  const int k0 = p.loop_iteration();  // 4
  EXPECT_EQ(k0, 4);
  EXPECT_EQ(single_hop_arrival_prob(p, k0), single_hop_arrival_prob(ring_params(3), k0));
  double expected = 0.495 * 0.495 / std::pow(1.5, 6);
  expected *= 1.1 * 1.2 * 1.3;
  EXPECT_NEAR(single_hop_arrival_prob(p, 7), expected, 1e-15);
}

TEST(Gamma, BoundaryAndLowerBound) {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const auto p = random_params(rng);
    const int k0 = p.loop_iteration();
    EXPECT_EQ(p.gamma(k0, k0, p.in_degree, p.eta), 1.0);
    for (int k = 0; k < k0 + 40; ++k) EXPECT_GE(p.gamma(k, k0, p.in_degree, p.eta), 1.0);
  }
}

TEST(Cumulative, ZeroBelowLmaxAndEqualAtLmax) {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const auto p = random_params(rng);
    const auto curve = convergence_curve(p, p.l_max + 5);
    for (int i = 0; i < p.l_max; ++i) EXPECT_EQ(curve[static_cast<std::size_t>(i)], 0.0);
    EXPECT_DOUBLE_EQ(curve[static_cast<std::size_t>(p.l_max)], single_hop_arrival_prob(p, p.l_max));
    EXPECT_EQ(cumulative_convergence_prob(p, p.l_max - 1), 0.0);
  }
}

TEST(Cumulative, BoundedMonotoneChainRule) {
  Rng rng(8);
  for (int t = 0; t < 300; ++t) {
    const auto p = random_params(rng);
    const auto curve = convergence_curve(p, 120);
    double prev = 0.0;
    for (int i = 1; i <= 120; ++i) {
      const double c = curve[static_cast<std::size_t>(i)];
      EXPECT_GE(c, prev);
      EXPECT_LE(c, 1.0);
      // P(I) = P(I-1) + (1 - P(I-1)) p_in(I)
      EXPECT_NEAR(c, prev + (1 - prev) * single_hop_arrival_prob(p, i), 1e-12);
      prev = c;
    }
  }
}

TEST(Cumulative, LongerPathsAndMoreErrorsNeverHelp) {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_params(rng);
    auto longer = p;
    ++longer.l_max;
    auto worse = p;
    worse.training_error = std::min(1.0, p.training_error + 0.1 * uniform01(rng) + 1e-3);
    const auto a = convergence_curve(p, 80), b = convergence_curve(longer, 80), c = convergence_curve(worse, 80);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_LE(b[i], a[i] + 1e-15);
      EXPECT_LE(c[i], a[i] + 1e-15);
    }
  }
}

TEST(Target, Boundaries) {
  const auto p = ring_params(4);
  EXPECT_EQ(iterations_for_target(p, 0.0), p.l_max);
  const double at = cumulative_convergence_prob(p, p.l_max);
  EXPECT_EQ(iterations_for_target(p, std::nextafter(at, 0.0)), p.l_max);
  EXPECT_EQ(iterations_for_target(p, at), p.l_max);
  EXPECT_EQ(iterations_for_target(p, std::nextafter(at, 1.0)), p.l_max + 1);
}

TEST(Target, UnitGammaPlateauAgainstOracle) {
  // With gamma = 1 the arrival mass on a 3-ring sums to 0.245 * 2 < 0.99: the target is out of reach.
  const auto p = ring_params(3);
  EXPECT_EQ(kind_of([&] { iterations_for_target(p, 0.99, 100000); }), ErrorKind::TargetUnreachable);

  // A reachable quantile agrees with the Monte Carlo first-passage quantile.
  Rng rng(12);
  const auto oracle = protocol::propagation_oracle(ring_graph(3), 0.5, 0.01, 100000, 60, rng);
  EXPECT_LT(oracle.probability.back(), 0.99);
  const int formula = iterations_for_target(p, 0.3);
  int mc = 0;
  while (oracle.probability[static_cast<std::size_t>(mc)] < 0.3) ++mc;
  EXPECT_LE(std::abs(formula - mc), 1);
}

TEST(Target, SaturatingGammaReaches99) {
  auto p = ring_params(5);
  p.gamma = GammaSchedule::saturating(2);
  const int it = iterations_for_target(p, 0.99);
  EXPECT_GE(cumulative_convergence_prob(p, it), 0.99);
  EXPECT_LT(cumulative_convergence_prob(p, it - 1), 0.99);
}

TEST(Time, Examples) {
  TimingParams t{0.01, 0.01, 10, 10};
  EXPECT_NEAR(convergence_time(t), 2.0, 1e-12);
  EXPECT_NEAR(convergence_time(t, TimeModel::Max), 0.2, 1e-12);
  auto zero = t;
  zero.iterations_gen = 0;
  EXPECT_EQ(convergence_time(zero), 0.0);
  auto dbl = t;
  dbl.iterations_gen = 20;
  EXPECT_DOUBLE_EQ(convergence_time(dbl), 2 * convergence_time(t));
}

TEST(Load, Examples) {
  const std::vector<double> h(5, 10000.0);
  const std::vector<int> q(5, 1);
  EXPECT_DOUBLE_EQ(communication_load(100, 0.5, h, 11.0, q), 2.75e7);
  EXPECT_EQ(communication_load(100, 0.0, h, 11.0, q), 0.0);
  EXPECT_EQ(kind_of([&] { communication_load(1, 0.5, h, 11.0, std::vector<int>(4, 1)); }), ErrorKind::ShapeMismatch);
}

TEST(Load, LinearInEachArgument) {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 6;
    std::vector<double> h;
    std::vector<int> q;
    for (int g = 0; g < n; ++g) {
      h.push_back(2.0 * (1000 + static_cast<int>(uniform01(rng) * 9000)));  // even, so 0.5 * H is an integer
      q.push_back(1 + static_cast<int>(uniform01(rng) * 3));
    }
    const long it = 1 + static_cast<long>(uniform01(rng) * 500);
    const double base = communication_load(it, 0.5, h, 11.0, q);
    EXPECT_DOUBLE_EQ(communication_load(2 * it, 0.5, h, 11.0, q), 2 * base);
    EXPECT_DOUBLE_EQ(communication_load(it, 0.5, h, 22.0, q), 2 * base);
    EXPECT_DOUBLE_EQ(communication_load(it, 1.0, h, 11.0, q), 2 * base);
    auto q2 = q;
    for (auto& x : q2) x *= 3;
    EXPECT_DOUBLE_EQ(communication_load(it, 0.5, h, 11.0, q2), 3 * base);
    auto h2 = h;
    for (auto& x : h2) x *= 2;
    EXPECT_DOUBLE_EQ(communication_load(it, 0.5, h2, 11.0, q), 2 * base);
  }
}

TEST(Load, QuotaIsCeiling) {
  EXPECT_EQ(share_quota(0.5, 10000), 5000);
  EXPECT_EQ(share_quota(0.5, 9999), 5000);
  EXPECT_EQ(share_quota(0.1, 30), 3);  // 0.1 * 30 lands a hair above 3 in floating point
  EXPECT_EQ(share_quota(0.0, 30), 0);
}

TEST(Params, Validation) {
  auto p = ring_params(3);
  p.eta = 0.0;
  EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::InvalidArgument);
  p = ring_params(3);
  p.l_max = 0;
  EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::InvalidArgument);
}

TEST(Params, FromGraph) {
  const auto p = ConvergenceParams::from_graph(ring_graph(6), 0.5, 0.01);
  EXPECT_EQ(p.l_max, 5);
  EXPECT_EQ(p.l_loop_min, 6);
  EXPECT_EQ(p.in_degree, 1);
}

TEST(Design, NeverSlowerThanTheRing) {
  std::vector<std::vector<topology::NodeId>> sets(5);
  for (int g = 0; g < 5; ++g)
    for (int j = 0; j < 5; ++j)
      if (g != j) sets[static_cast<std::size_t>(g)].push_back(j);
  const auto fs = topology::FeasibleSets::from_sets(sets);
  Rng rng(1);
  const auto ring = topology::construct_ring(fs, rng);
  DesignObjective obj;
  obj.gamma = GammaSchedule::saturating(2);
  const auto base = evaluate_design(ring, obj);
  int previous = base.iterations_to_target;
  ASSERT_GT(previous, 0);
  for (int budget = 5; budget <= 20; ++budget) {
    const auto d = design_topology(ring, fs, budget, obj);
    EXPECT_LE(d.links, budget);
    EXPECT_EQ(d.links, static_cast<int>(d.graph.num_edges()));
    ASSERT_GT(d.iterations_to_target, 0);
    EXPECT_LE(d.iterations_to_target, previous);  // a larger allowance can always reuse the smaller choice
    previous = d.iterations_to_target;
  }
}
