#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "uavcgan/convergence/cost.hpp"
#include "uavcgan/protocol/scenario.hpp"
#include "uavcgan/topology/graph.hpp"

namespace uavcgan::protocol {

enum class Scheme { Distributed, Standalone, Centralized, ParameterAveraging };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Distributed: return "distributed";
    case Scheme::Standalone: return "standalone";
    case Scheme::Centralized: return "centralized";
    case Scheme::ParameterAveraging: return "parameter_averaging";
  }
  return "unknown";
}

inline Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::Distributed, Scheme::Standalone, Scheme::Centralized, Scheme::ParameterAveraging})
    if (to_string(s) == name) return s;
  fail(ErrorKind::UnknownBaseline, "unknown scheme '" + std::string(name) + "'");
}

struct TrainingConfig {
  learner::LearnerConfig learner;
  int batch_size = 64;   // o
  int local_steps = 1;   // discriminator/generator update pairs per round
  double eta = 0.5;
  double rho = 11.0;
  int eval_every = 0;    // rounds between JSD evaluations; 0 disables
  std::size_t eval_samples = 2000;  // generated samples per direction for JSD
  int averaging_period = 1;
  int workers = 1;
  std::uint64_t seed = 1;
  double share_slot = 0.01;
  double local_train_time = 0.0;
  double ne_eps_d = 0.05;
  double ne_eps_jsd = 0.05;
};

/// Generated samples one node published for one neighbour in one round. Immutable once delivered.
struct SharedBatch {
  int sender = 0;
  std::vector<cdouble> gains;
  std::vector<int> dirs;
};

struct MetricRow {
  int round = 0;
  int node = 0;
  double jsd = std::numeric_limits<double>::quiet_NaN();  // NaN when not evaluated this round
  double value = 0.0;
  double disc_mean = 0.0;
  double load_cum = 0.0;
};

struct NodeRuntime {
  learner::LearnerState learner;
  std::vector<learner::Matrix> buckets;  // standardised local samples per direction
  long dataset_size = 0;
  Rng rng;
  double value = 0.0;
  double disc_mean = 0.0;
};

struct SimulationState {
  Scheme scheme = Scheme::Distributed;
  int round = 0;
  std::vector<NodeRuntime> nodes;
  std::vector<std::vector<std::shared_ptr<const SharedBatch>>> inboxes;  // per receiver, sorted by sender
  std::int64_t shared_samples = 0;
  double simulated_time = 0.0;
  std::vector<MetricRow> metrics;
  int batch_scale = 1;  // the pooled learner processes the whole fleet's batch each step

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  double load(double rho) const { return static_cast<double>(shared_samples) * rho; }
};

namespace detail {

inline std::vector<learner::Matrix> make_buckets(const NodeDataset& data, const learner::Scaler& scaler, int directions) {
  std::vector<std::vector<Eigen::Vector2d>> cols(static_cast<std::size_t>(directions));
  for (std::size_t k = 0; k < data.size(); ++k)
    cols.at(static_cast<std::size_t>(data.dirs[k] - 1)).push_back(scaler.standardize(data.gains[k], data.dirs[k]));
  std::vector<learner::Matrix> out;
  for (int d = 0; d < directions; ++d) {
    const auto& c = cols[static_cast<std::size_t>(d)];
    require(!c.empty(), ErrorKind::EmptyDataset, "local dataset has no samples for direction " + std::to_string(d + 1));
    learner::Matrix m(2, static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = c[k];
    out.push_back(std::move(m));
  }
  return out;
}

/// Runs f(g) for every node; work is split across threads but each node is touched by one thread only.
template <typename F>
void for_each_node(int num_nodes, int workers, F f) {
  const int w = std::clamp(workers, 1, std::max(num_nodes, 1));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(num_nodes));
  auto body = [&](int start) {
    for (int g = start; g < num_nodes; g += w) {
      try {
        f(g);
      } catch (...) {
        errors[static_cast<std::size_t>(g)] = std::current_exception();
      }
    }
  };
  if (w == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) pool.emplace_back(body, t);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Evaluation draws come from their own stream so turning evaluation on or off never changes training.
inline Rng eval_stream(std::uint64_t seed, int round, int node) {
  return make_stream(mix_seed(seed, 0xE7A1ULL + static_cast<std::uint64_t>(round)), static_cast<std::uint64_t>(node));
}

inline learner::CondBatch draw_local(const NodeRuntime& n, const std::vector<int>& conds, std::size_t count, Rng& rng) {
  learner::CondBatch b{learner::Matrix(2, static_cast<Eigen::Index>(count)),
                       std::vector<int>(conds.begin(), conds.begin() + static_cast<long>(count))};
  for (std::size_t k = 0; k < count; ++k) {
    const auto& bucket = n.buckets[static_cast<std::size_t>(conds[k] - 1)];
    std::uniform_int_distribution<Eigen::Index> pick(0, bucket.cols() - 1);
    b.x.col(static_cast<Eigen::Index>(k)) = bucket.col(pick(rng));
  }
  return b;
}

inline learner::CondBatch draw_shared(const NodeRuntime& n, const SharedBatch& batch, std::size_t count, Rng& rng) {
  learner::CondBatch b{learner::Matrix(2, static_cast<Eigen::Index>(count)), std::vector<int>(count)};
  std::uniform_int_distribution<std::size_t> pick(0, batch.gains.size() - 1);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t idx = pick(rng);
    b.dirs[k] = batch.dirs[idx];
    b.x.col(static_cast<Eigen::Index>(k)) = n.learner.scaler.standardize(batch.gains[idx], batch.dirs[idx]);
  }
  return b;
}

}  // namespace detail

/// Learners start from per-node random streams; parameter averaging starts every node from node 0's draw.
inline SimulationState init_state(Scheme scheme, const std::vector<NodeDataset>& datasets, const TrainingConfig& cfg) {
  require(!datasets.empty(), ErrorKind::EmptyDataset, "no node datasets");
  SimulationState s;
  s.scheme = scheme;
  const int directions = cfg.learner.directions;
  std::vector<NodeDataset> parts = datasets;
  if (scheme == Scheme::Centralized) {
    parts = {NodeDataset::pooled(datasets)};
    s.batch_scale = static_cast<int>(datasets.size());
  }
  const int n = static_cast<int>(parts.size());
  std::vector<learner::Scaler> scalers;
  for (const auto& p : parts) {
    require(p.size() > 0, ErrorKind::EmptyDataset, "a node has an empty dataset");
    scalers.push_back(learner::Scaler::fit(p.gains, p.dirs, directions));
  }
  if (scheme == Scheme::ParameterAveraging) {
    // Aggregated statistics so averaged weights act in one common unit system.
    learner::Scaler avg = scalers.front();
    for (std::size_t d = 0; d < static_cast<std::size_t>(directions); ++d) {
      double mr = 0, mi = 0, sr = 0, si = 0;
      for (const auto& sc : scalers) {
        mr += sc.mean_re[d];
        mi += sc.mean_im[d];
        sr += sc.std_re[d];
        si += sc.std_im[d];
      }
      avg.mean_re[d] = mr / n;
      avg.mean_im[d] = mi / n;
      avg.std_re[d] = sr / n;
      avg.std_im[d] = si / n;
    }
    scalers.assign(static_cast<std::size_t>(n), avg);
  }
  for (int g = 0; g < n; ++g) {
    NodeRuntime node;
    const int init_id = scheme == Scheme::ParameterAveraging ? 0 : g;
    Rng init = make_stream(cfg.seed, 1000 + static_cast<std::uint64_t>(init_id));
    node.learner = learner::LearnerState::create(cfg.learner, init);
    node.learner.scaler = scalers[static_cast<std::size_t>(g)];
    node.buckets = detail::make_buckets(parts[static_cast<std::size_t>(g)], node.learner.scaler, directions);
    node.dataset_size = static_cast<long>(parts[static_cast<std::size_t>(g)].size());
    node.rng = make_stream(cfg.seed, static_cast<std::uint64_t>(g));
    s.nodes.push_back(std::move(node));
  }
  s.inboxes.assign(static_cast<std::size_t>(n), {});
  return s;
}

/// Local updates of one node against the previous round's inbox.
inline void train_node(SimulationState& s, int g, const TrainingConfig& cfg, double eta) {
  NodeRuntime& n = s.nodes[static_cast<std::size_t>(g)];
  const auto& inbox = s.inboxes[static_cast<std::size_t>(g)];
  learner::MixWeights w;
  if (eta > 0.0 && !inbox.empty()) {
    std::map<int, long> sizes;
    for (const auto& b : inbox) sizes[b->sender] = s.nodes[static_cast<std::size_t>(b->sender)].dataset_size;
    w = learner::mix_weights(n.dataset_size, sizes, eta);
  }
  const int o = cfg.batch_size * s.batch_scale;
  const auto batch = static_cast<std::size_t>(o);
  for (int step = 0; step < cfg.local_steps; ++step) {
    const auto conds = learner::sample_conditions(cfg.learner.directions, batch, n.rng);
    const auto z = learner::sample_noise(cfg.learner.noise_dim, batch, n.rng);
    const auto fake = n.learner.gen.generate(z, conds);
    const auto n_local = static_cast<std::size_t>(std::lround(w.self_weight * o));
    auto real = detail::draw_local(n, conds, std::min(n_local, batch), n.rng);
    learner::CondBatch shared;
    for (const auto& b : inbox) {
      const auto count = static_cast<std::size_t>(std::lround(w.neighbor_weights.at(b->sender) * o));
      if (count > 0) shared.append(detail::draw_shared(n, *b, count, n.rng));
    }
    learner::train_step_disc(n.learner, real, shared, fake, cfg.learner.lr_disc);
    learner::train_step_gen(n.learner, z, conds, cfg.learner.lr_gen);
    if (step + 1 == cfg.local_steps) {
      real.append(shared);
      n.value = learner::value_function(n.learner.disc, n.learner.gen, real, z, conds);
      const auto after = n.learner.gen.generate(z, conds);
      n.disc_mean = 0.5 * (n.learner.disc.scores(real).mean() + n.learner.disc.scores(after).mean());
    }
  }
}

inline void average_parameters(SimulationState& s) {
  const double n = static_cast<double>(s.nodes.size());
  learner::Vector gen = learner::Vector::Zero(s.nodes[0].learner.gen.net.params().size());
  learner::Vector disc = learner::Vector::Zero(s.nodes[0].learner.disc.net.params().size());
  for (const auto& node : s.nodes) {
    gen += node.learner.gen.net.params();
    disc += node.learner.disc.net.params();
  }
  gen /= n;
  disc /= n;
  for (auto& node : s.nodes) {
    node.learner.gen.net.params() = gen;
    node.learner.disc.net.params() = disc;
  }
}

/// One synchronous round: every node trains on last round's inbox, then publishes ceil(eta H_g)
/// fresh samples to each out-neighbour. Metrics get one row per node.
inline void run_round(SimulationState& s, const topology::NetworkGraph& graph, const TrainingConfig& cfg,
                      const EvalReference* reference = nullptr) {
  const int n = s.num_nodes();
  const bool sharing = s.scheme == Scheme::Distributed;
  const double eta = sharing ? cfg.eta : 0.0;
  if (sharing)
    require(graph.num_nodes() == n, ErrorKind::ShapeMismatch, "graph and simulation disagree on fleet size");
  std::vector<std::shared_ptr<const SharedBatch>> published(static_cast<std::size_t>(n));
  try {
    detail::for_each_node(n, cfg.workers, [&](int g) {
      train_node(s, g, cfg, eta);
      const auto quota = convergence::share_quota(eta, static_cast<double>(s.nodes[static_cast<std::size_t>(g)].dataset_size));
      if (quota > 0 && !graph.out_neighbors(g).empty()) {
        auto batch = std::make_shared<SharedBatch>();
        batch->sender = g;
        auto& node = s.nodes[static_cast<std::size_t>(g)];
        batch->dirs = learner::sample_conditions(cfg.learner.directions, static_cast<std::size_t>(quota), node.rng);
        batch->gains = learner::generate_gains(node.learner, batch->dirs, node.rng);
        published[static_cast<std::size_t>(g)] = std::move(batch);
      }
    });
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NumericalDivergence)
      fail(e.kind(), e.detail() + " at round " + std::to_string(s.round));
    throw;
  }

  // Barrier passed: deliver in sender order so inbox layout never depends on scheduling.
  std::vector<std::vector<std::shared_ptr<const SharedBatch>>> next(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    const auto& b = published[static_cast<std::size_t>(g)];
    if (!b) continue;
    for (int dst : graph.out_neighbors(g)) {
      next[static_cast<std::size_t>(dst)].push_back(b);
      s.shared_samples += static_cast<std::int64_t>(b->gains.size());
    }
  }
  s.inboxes = std::move(next);

  if (s.scheme == Scheme::ParameterAveraging && (s.round + 1) % std::max(cfg.averaging_period, 1) == 0)
    average_parameters(s);

  const bool evaluate = reference && cfg.eval_every > 0 && (s.round + 1) % cfg.eval_every == 0;
  std::vector<double> jsd(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
  if (evaluate) {
    detail::for_each_node(n, cfg.workers, [&](int g) {
      Rng rng = detail::eval_stream(cfg.seed, s.round, g);
      jsd[static_cast<std::size_t>(g)] =
          learner_jsd(s.nodes[static_cast<std::size_t>(g)].learner, *reference, cfg.eval_samples, rng);
    });
  }
  for (int g = 0; g < n; ++g) {
    const auto& node = s.nodes[static_cast<std::size_t>(g)];
    s.metrics.push_back({s.round + 1, g, jsd[static_cast<std::size_t>(g)], node.value, node.disc_mean, s.load(cfg.rho)});
  }
  s.simulated_time += cfg.share_slot + cfg.local_train_time;
  ++s.round;
}

/// Equilibrium test for one node: mean |D - 1/2| on a fresh real+generated batch and the average JSD.
inline bool node_at_ne(const SimulationState& s, int g, const TrainingConfig& cfg, const EvalReference& ref) {
  const auto& node = s.nodes[static_cast<std::size_t>(g)];
  Rng rng = detail::eval_stream(cfg.seed ^ 0x4E45ULL, s.round, g);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const auto conds = learner::sample_conditions(cfg.learner.directions, batch, rng);
  auto real = detail::draw_local(node, conds, batch, rng);
  const auto fake = node.learner.gen.generate(learner::sample_noise(cfg.learner.noise_dim, batch, rng), conds);
  real.append(fake);
  const learner::Vector d = node.learner.disc.scores(real);
  std::vector<int> dirs;
  for (int i = 1; i <= cfg.learner.directions; ++i) dirs.insert(dirs.end(), cfg.eval_samples, i);
  const auto gains = learner::generate_gains(node.learner, dirs, rng);
  const auto learned = learner::condition_histograms(gains, dirs, ref.scaler, ref.bins, ref.range);
  return learner::ne_check(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())), learned, ref.hist,
                           cfg.ne_eps_d, cfg.ne_eps_jsd);
}

struct NeResult {
  int rounds_used = 0;
  bool converged = false;
};

/// Checks before every round (so a converged start costs zero rounds) and stops at max_rounds.
inline NeResult run_until_ne(SimulationState& s, const topology::NetworkGraph& graph, const TrainingConfig& cfg,
                             int max_rounds, const EvalReference& ref) {
  require(max_rounds >= 1, ErrorKind::InvalidArgument, "max_rounds must be at least 1");
  auto all_converged = [&] {
    for (int g = 0; g < s.num_nodes(); ++g)
      if (!node_at_ne(s, g, cfg, ref)) return false;
    return true;
  };
  NeResult r;
  while (true) {
    if (all_converged()) {
      r.converged = true;
      return r;
    }
    if (r.rounds_used == max_rounds) return r;
    run_round(s, graph, cfg, &ref);
    ++r.rounds_used;
  }
}

/// Runs `rounds` rounds and returns the metric trace.
inline std::vector<MetricRow> run_training(SimulationState& s, const topology::NetworkGraph& graph,
                                           const TrainingConfig& cfg, int rounds, const EvalReference* ref) {
  for (int r = 0; r < rounds; ++r) run_round(s, graph, cfg, ref);
  return s.metrics;
}

/// Baseline schemes: no sharing, so they run over an edgeless graph.
inline std::vector<MetricRow> run_baseline(std::string_view scheme, const std::vector<NodeDataset>& datasets,
                                           const TrainingConfig& cfg, int rounds, const EvalReference* ref,
                                           SimulationState* final_state = nullptr) {
  const Scheme sc = parse_scheme(scheme);
  require(sc != Scheme::Distributed, ErrorKind::UnknownBaseline, "'distributed' is not a baseline scheme");
  SimulationState s = init_state(sc, datasets, cfg);
  const topology::NetworkGraph none(s.num_nodes(), std::max(s.num_nodes(), 1));
  run_training(s, none, cfg, rounds, ref);
  auto out = s.metrics;
  if (final_state) *final_state = std::move(s);
  return out;
}

inline std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
  std::string text = "round,node,jsd,value,disc_mean,load_cum\n";
  for (const auto& m : rows) {
    csv::Row row;
    row << m.round << m.node;
    if (std::isnan(m.jsd))
      row << std::string();
    else
      row << m.jsd;
    row << m.value << m.disc_mean << m.load_cum;
    text += row.str() + "\n";
  }
  return text;
}

}  // namespace uavcgan::protocol
