#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uavcgan/cli/config.hpp"
#include "uavcgan/convergence/cost.hpp"
#include "uavcgan/convergence/design.hpp"
#include "uavcgan/convergence/probability.hpp"
#include "uavcgan/learner/checkpoint.hpp"
#include "uavcgan/protocol/oracle.hpp"
#include "uavcgan/protocol/simulation.hpp"
#include "uavcgan/topology/io.hpp"
#include "uavcgan/topology/ring.hpp"

namespace uavcgan::cli {

/// Orbit centres of the first `fleet_size` UAVs: explicit lists if given, otherwise the layout rule.
inline protocol::FleetGeometry fleet_geometry(const ScenarioConfig& c, int fleet_size) {
  const auto& f = c.fleet;
  std::vector<double> dist, az;
  for (int k = 0; k < fleet_size; ++k) {
    if (static_cast<std::size_t>(k) < f.distances_m.size()) {
      dist.push_back(f.distances_m[static_cast<std::size_t>(k)]);
      az.push_back(f.azimuths_deg[static_cast<std::size_t>(k)]);
    } else {
      dist.push_back(f.base_distance_m + k * f.distance_step_m);
      az.push_back(k * f.azimuth_step_deg);
    }
  }
  auto geo = protocol::FleetGeometry::from_polar(dist, az, f.altitude_m);
  geo.ground_station = channel::Vec3(f.ground_station[0], f.ground_station[1], f.ground_station[2]);
  geo.orbit_radius = f.orbit_radius_m;
  geo.orbit_period = f.orbit_period_s;
  geo.sample_interval = f.sample_interval_s;
  return geo;
}

inline topology::LinkParameters link_parameters(const ScenarioConfig& c, int fleet_size) {
  topology::LinkParameters p;
  p.max_power_dbm = c.radio.max_power_dbm;
  p.link_tx_power_dbm = c.radio.link_tx_power_dbm;
  p.noise_density_dbm_hz = c.radio.noise_dbm_hz;
  p.bandwidth_hz = c.radio.bandwidth_hz;
  p.snr_threshold_db = c.radio.snr_threshold_db;
  p.share_deadline_s = c.sharing.slot_s;
  p.carrier_frequency = c.radio.carrier_frequency_hz;
  p.pathloss_exponent = c.radio.pathloss_exponent;
  p.eta = c.sharing.eta;
  p.rho = c.sharing.rho;
  p.dataset_sizes.assign(static_cast<std::size_t>(fleet_size), static_cast<double>(c.sharing.dataset_size));
  return p;
}

inline convergence::DesignObjective design_objective(const ScenarioConfig& c) {
  return {c.sharing.eta, c.convergence.training_error, c.gamma_schedule(), c.convergence.target_probability,
          c.convergence.max_iterations};
}

/// Ring first, then augmentation within `blocks` links (a pure ring when blocks == G). Unless
/// fleet.fill_budget is set, the link count is the one converging fastest.
inline topology::NetworkGraph build_topology(const ScenarioConfig& c, int fleet_size, int blocks, std::uint64_t seed) {
  const auto geo = fleet_geometry(c, fleet_size);
  const std::vector<topology::Position> pos(geo.orbit_centers.begin(), geo.orbit_centers.end());
  const auto sets = topology::compute_feasible_sets(pos, link_parameters(c, fleet_size));
  Rng rng = make_stream(seed, 0x70B0ULL);
  const auto ring = topology::construct_ring(sets, rng);
  if (blocks == fleet_size) return ring;
  if (c.fleet.fill_budget) return topology::augment_and_prune(ring, sets, blocks);
  return convergence::design_topology(ring, sets, blocks, design_objective(c)).graph;
}

inline convergence::ConvergenceParams convergence_params(const ScenarioConfig& c,
                                                         const topology::NetworkGraph& graph) {
  return convergence::ConvergenceParams::from_graph(graph, c.sharing.eta, c.convergence.training_error,
                                                    c.gamma_schedule(), c.convergence.target_probability);
}

inline protocol::ChannelSetup channel_setup(const ScenarioConfig& c) {
  protocol::ChannelSetup s;
  const auto I = static_cast<std::size_t>(c.radio.directions);
  s.field = channel::make_ground_truth_field(I, c.radio.carrier_frequency_hz, c.radio.pathloss_exponent,
                                             static_cast<std::uint64_t>(c.training.field_seed), c.radio.rician_k_db,
                                             c.radio.rician_k_spread_db);
  s.codebook = channel::make_codebook(I, static_cast<std::size_t>(c.radio.tx_antennas),
                                      static_cast<std::size_t>(c.radio.rx_antennas));
  s.pilot_power_w = topology::dbm_to_watts(c.radio.pilot_power_dbm);
  s.noise_power_w = topology::dbm_to_watts(c.radio.noise_dbm_hz + 10.0 * std::log10(c.radio.bandwidth_hz));
  return s;
}

inline protocol::TrainingConfig training_config(const ScenarioConfig& c, std::uint64_t seed, int workers) {
  protocol::TrainingConfig t;
  t.learner = c.learner_config();
  t.batch_size = c.learner.batch_size;
  t.local_steps = c.learner.local_steps;
  t.eta = c.sharing.eta;
  t.rho = c.sharing.rho;
  t.eval_every = c.training.eval_every;
  t.eval_samples = static_cast<std::size_t>(c.training.eval_samples);
  t.averaging_period = c.training.averaging_period;
  t.workers = workers;
  t.seed = seed;
  t.share_slot = c.sharing.slot_s;
  t.local_train_time = c.sharing.local_train_time_s;
  t.ne_eps_d = c.training.ne_eps_d;
  t.ne_eps_jsd = c.training.ne_eps_jsd;
  return t;
}

// ---------------------------------------------------------------------------------------------
// Formula-based studies

inline std::string convergence_rows(const std::string& label, const convergence::ConvergenceParams& p,
                                    int max_iterations) {
  std::string out;
  const auto curve = convergence::convergence_curve(p, max_iterations);
  for (int i = 1; i <= max_iterations; ++i) {
    csv::Row row;
    row << label << i << curve[static_cast<std::size_t>(i)] << "ok";
    out += row.str() + "\n";
  }
  return out;
}

struct CurveStudy {
  std::string csv;      // <key>,iteration,probability,status
  std::string summary;  // <key>,l_max,l_loop_min,max_in_degree,edges,iterations_to_target,status
};

/// Shared body of the two trend studies: one topology per (fleet size, block count) point.
inline CurveStudy convergence_study(const ScenarioConfig& c, const std::string& key,
                                    const std::vector<std::pair<int, int>>& points, std::uint64_t seed) {
  CurveStudy s;
  s.csv = key + ",iteration,probability,status\n";
  s.summary = key + ",l_max,l_loop_min,max_in_degree,edges,iterations_to_target,status\n";
  for (const auto& [g, b] : points) {
    const std::string label = std::to_string(key == "blocks" ? b : g);
    try {
      const auto graph = build_topology(c, g, b, seed);
      const auto p = convergence_params(c, graph);
      s.csv += convergence_rows(label, p, c.convergence.max_iterations);
      csv::Row row;
      row << label << p.l_max << p.l_loop_min << p.in_degree << static_cast<long>(graph.num_edges());
      try {
        row << convergence::iterations_for_target(p) << "ok";
      } catch (const Error& e) {
        row << std::string() << to_string(e.kind());
      }
      s.summary += row.str() + "\n";
    } catch (const Error& e) {
      csv::Row row;
      row << label << std::string() << std::string() << to_string(e.kind());
      s.csv += row.str() + "\n";
      csv::Row srow;
      srow << label << std::string() << std::string() << std::string() << std::string() << std::string()
           << to_string(e.kind());
      s.summary += srow.str() + "\n";
    }
  }
  return s;
}

inline CurveStudy experiment_fig3(const ScenarioConfig& c, const std::vector<int>& block_counts, std::uint64_t seed) {
  std::vector<std::pair<int, int>> pts;
  for (int b : block_counts) pts.push_back({c.fleet.size, b});
  return convergence_study(c, "blocks", pts, seed);
}

inline CurveStudy experiment_fig4(const ScenarioConfig& c, const std::vector<int>& fleet_sizes, std::uint64_t seed) {
  std::vector<std::pair<int, int>> pts;
  for (int g : fleet_sizes) pts.push_back({g, c.experiments.fig4_blocks});
  return convergence_study(c, "fleet_size", pts, seed);
}

/// Closed form next to the Monte Carlo oracle for one topology.
inline std::string convergence_with_oracle(const ScenarioConfig& c, const topology::NetworkGraph& graph,
                                           std::uint64_t seed) {
  const auto p = convergence_params(c, graph);
  const int max_i = c.convergence.max_iterations;
  const auto curve = convergence::convergence_curve(p, max_i);
  Rng rng = make_stream(seed, 0x0AC1EULL);
  const auto oracle = protocol::propagation_oracle(graph, c.sharing.eta, c.convergence.training_error,
                                                   c.convergence.oracle_trials, max_i, rng, c.gamma_schedule());
  std::string out = "iteration,probability,oracle,oracle_se\n";
  for (int i = 0; i <= max_i; ++i) {
    const auto k = static_cast<std::size_t>(i);
    csv::Row row;
    row << i << curve[k] << oracle.probability[k] << oracle.std_error[k];
    out += row.str() + "\n";
  }
  return out;
}

/// Load per block count with the iteration count pinned to overhead_iterations, and with the
/// iteration count each topology needs to reach the target.
inline std::string experiment_overhead(const ScenarioConfig& c, const std::vector<int>& block_counts,
                                       std::uint64_t seed) {
  std::string out = "blocks,edges,iterations,load,iterations_to_target,load_at_target\n";
  const int g = c.fleet.size;
  const std::vector<double> sizes(static_cast<std::size_t>(g), static_cast<double>(c.sharing.dataset_size));
  for (int b : block_counts) {
    const auto graph = build_topology(c, g, b, seed);
    std::vector<int> q;
    for (int n = 0; n < g; ++n) q.push_back(static_cast<int>(graph.out_neighbors(n).size()));
    const long fixed = c.experiments.overhead_iterations;
    csv::Row row;
    row << b << static_cast<long>(graph.num_edges()) << fixed
        << convergence::communication_load(fixed, c.sharing.eta, sizes, c.sharing.rho, q);
    try {
      const int it = convergence::iterations_for_target(convergence_params(c, graph));
      row << it << convergence::communication_load(it, c.sharing.eta, sizes, c.sharing.rho, q);
    } catch (const Error&) {
      row << std::string() << std::string();
    }
    out += row.str() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Learning studies

struct LearningRun {
  protocol::Scheme scheme = protocol::Scheme::Distributed;
  std::uint64_t seed = 0;
  int fleet_size = 0;
  std::vector<protocol::MetricRow> metrics;
  std::string topology_csv;
  double final_jsd = 0.0;  // average over nodes at the last evaluation
  protocol::RateResult rate;
  std::vector<int> chosen_direction;
  std::vector<std::string> checkpoints;  // final learner per node
  double wall_seconds = 0.0;
};

/// Everything that depends only on (config, fleet size): datasets per seed are drawn inside.
struct LearningScenario {
  protocol::ChannelSetup setup;
  protocol::FleetGeometry geometry;
  protocol::TruthSamples truth;  // reference distribution points
  protocol::TruthSamples rate_truth;
  protocol::EvalReference reference;
};

inline LearningScenario learning_scenario(const ScenarioConfig& c, int fleet_size) {
  LearningScenario s;
  s.setup = channel_setup(c);
  s.geometry = fleet_geometry(c, fleet_size);
  // Evaluation points sit on later, disjoint stretches of each orbit.
  s.truth = protocol::sample_truth(s.setup, s.geometry, static_cast<std::size_t>(c.training.truth_points), 1e5);
  s.rate_truth = protocol::sample_truth(s.setup, s.geometry, static_cast<std::size_t>(c.training.rate_points), 2e5);
  s.reference = protocol::make_reference(s.truth, c.radio.directions);
  return s;
}

inline std::vector<protocol::NodeDataset> node_datasets(const ScenarioConfig& c, const LearningScenario& s,
                                                        std::uint64_t seed) {
  std::vector<protocol::NodeDataset> out;
  for (int g = 0; g < s.geometry.num_nodes(); ++g) {
    Rng rng = make_stream(seed, 0xDA7A00ULL + static_cast<std::uint64_t>(g));
    out.push_back(protocol::collect_node_dataset(s.setup, s.geometry, g,
                                                 static_cast<std::size_t>(c.sharing.dataset_size), rng));
  }
  return out;
}

inline LearningRun run_learning(const ScenarioConfig& c, const LearningScenario& s, protocol::Scheme scheme,
                                std::uint64_t seed, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  const int g = s.geometry.num_nodes();
  LearningRun run;
  run.scheme = scheme;
  run.seed = seed;
  run.fleet_size = g;
  const auto data = node_datasets(c, s, seed);
  auto cfg = training_config(c, seed, workers);
  if (cfg.eval_every == 0 || c.training.rounds % cfg.eval_every != 0) cfg.eval_every = c.training.rounds;

  auto state = protocol::init_state(scheme, data, cfg);
  if (scheme == protocol::Scheme::Distributed) {
    const auto graph = build_topology(c, g, c.fleet.resource_blocks, seed);
    run.topology_csv = topology::edges_to_csv(graph);
    protocol::run_training(state, graph, cfg, c.training.rounds, &s.reference);
  } else {
    const topology::NetworkGraph none(state.num_nodes(), state.num_nodes());
    protocol::run_training(state, none, cfg, c.training.rounds, &s.reference);
  }
  run.metrics = state.metrics;

  double acc = 0.0;
  int n = 0;
  for (const auto& m : state.metrics)
    if (m.round == c.training.rounds && !std::isnan(m.jsd)) {
      acc += m.jsd;
      ++n;
    }
  run.final_jsd = n ? acc / n : std::numeric_limits<double>::quiet_NaN();

  for (int k = 0; k < g; ++k) {
    const int owner = std::min(k, state.num_nodes() - 1);  // the pooled learner serves every UAV
    Rng rng = make_stream(seed, 0xBEA0ULL + static_cast<std::uint64_t>(k));
    run.chosen_direction.push_back(protocol::learned_best_direction(
        state.nodes[static_cast<std::size_t>(owner)].learner, static_cast<std::size_t>(c.training.eval_samples), rng));
  }
  run.rate = protocol::rate_comparison(s.setup, s.rate_truth, run.chosen_direction,
                                       topology::dbm_to_watts(c.radio.max_power_dbm), s.setup.noise_power_w,
                                       c.radio.bandwidth_hz);
  for (const auto& node : state.nodes) run.checkpoints.push_back(learner::checkpoint_to_text(node.learner));
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

/// Per-round node-averaged JSD for every (scheme, seed), plus the final summary with beam rates.
struct JsdStudy {
  std::vector<LearningRun> runs;
  std::string trace;    // scheme,seed,round,jsd
  std::string summary;  // scheme,seed,final_jsd,learned_rate_bps,genie_rate_bps,rate_ratio
};

inline JsdStudy experiment_jsd(const ScenarioConfig& c, const std::vector<std::string>& schemes,
                               const std::vector<long>& seeds, int workers) {
  JsdStudy st;
  const auto scenario = learning_scenario(c, c.fleet.size);
  st.trace = "scheme,seed,round,jsd\n";
  st.summary = "scheme,seed,final_jsd,learned_rate_bps,genie_rate_bps,rate_ratio\n";
  for (const auto& name : schemes) {
    const auto scheme = protocol::parse_scheme(name);
    for (long seed : seeds) {
      auto run = run_learning(c, scenario, scheme, static_cast<std::uint64_t>(seed), workers);
      std::map<int, std::pair<double, int>> per_round;
      for (const auto& m : run.metrics)
        if (!std::isnan(m.jsd)) {
          per_round[m.round].first += m.jsd;
          ++per_round[m.round].second;
        }
      for (const auto& [round, v] : per_round) {
        csv::Row row;
        row << name << seed << round << v.first / v.second;
        st.trace += row.str() + "\n";
      }
      csv::Row row;
      row << name << seed << run.final_jsd << run.rate.learned << run.rate.genie << run.rate.ratio();
      st.summary += row.str() + "\n";
      st.runs.push_back(std::move(run));
    }
  }
  return st;
}

/// Learned-beam versus genie-beam downlink rate after distributed training, per fleet size and seed.
inline std::string experiment_rate(const ScenarioConfig& c, const std::vector<int>& fleet_sizes,
                                   const std::vector<long>& seeds, int workers) {
  std::string out = "fleet_size,seed,learned_rate_bps,genie_rate_bps,rate_ratio\n";
  for (int g : fleet_sizes) {
    ScenarioConfig sized = c;
    sized.fleet.size = g;
    sized.fleet.resource_blocks = std::max(c.fleet.resource_blocks, g);
    const auto scenario = learning_scenario(sized, g);
    for (long seed : seeds) {
      const auto run = run_learning(sized, scenario, protocol::Scheme::Distributed, static_cast<std::uint64_t>(seed),
                                    workers);
      csv::Row row;
      row << g << seed << run.rate.learned << run.rate.genie << run.rate.ratio();
      out += row.str() + "\n";
    }
  }
  return out;
}

}  // namespace uavcgan::cli
