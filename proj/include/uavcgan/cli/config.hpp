#pragma once

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include "uavcgan/convergence/probability.hpp"
#include "uavcgan/core/csv.hpp"
#include "uavcgan/learner/gan.hpp"

namespace uavcgan::cli {

struct FleetConfig {
  int size = 5;               // G
  int resource_blocks = 5;    // B
  std::vector<double> distances_m;    // explicit per-node ground distance; empty -> layout rule
  std::vector<double> azimuths_deg;
  double base_distance_m = 150.0;     // layout rule: node k at base + k*step, azimuth k*az_step
  double distance_step_m = 65.0;
  double azimuth_step_deg = 15.0;
  double altitude_m = 100.0;
  std::vector<double> ground_station{0.0, 0.0, 10.0};
  double orbit_radius_m = 20.0;
  double orbit_period_s = 60.0;
  double sample_interval_s = 0.05;
  bool fill_budget = false;  // true: always spend every resource block on links
};

struct RadioConfig {
  int tx_antennas = 256;  // L
  int rx_antennas = 64;   // K
  int directions = 81;    // I
  double carrier_frequency_hz = 30e9;
  double bandwidth_hz = 2e6;
  double max_power_dbm = 40.0;
  double link_tx_power_dbm = 30.0;
  double noise_dbm_hz = -174.0;
  double snr_threshold_db = 12.0;
  double pathloss_exponent = 2.0;
  double rician_k_db = 10.0;
  double rician_k_spread_db = 3.0;
  double pilot_power_dbm = 40.0;
};

struct ConvergenceConfig {
  double training_error = 0.01;
  double target_probability = 0.99;
  std::string gamma = "saturating";  // unit | linear | saturating
  int gamma_ramp = 2;
  double gamma_slope = 0.05;
  double gamma_cap = 1.5;
  int max_iterations = 200;
  long oracle_trials = 100000;
};

struct SharingConfig {
  double slot_s = 0.01;
  double eta = 0.5;
  double rho = 11.0;
  long dataset_size = 10000;  // H_g
  double local_train_time_s = 0.0;
};

struct LearnerSection {
  int noise_dim = 4;
  std::vector<int> hidden{32, 32};
  double leaky_slope = 0.2;
  std::string optimizer = "adam";  // adam | sgd
  double lr_disc = 1e-3;
  double lr_gen = 1e-3;
  double momentum = 0.5;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::string gen_loss = "non_saturating";  // non_saturating | literal
  int batch_size = 64;
  int local_steps = 1;
};

struct TrainingSection {
  int rounds = 300;
  int eval_every = 50;
  long eval_samples = 10000;
  int averaging_period = 1;
  std::vector<long> seeds{1, 2, 3};
  long field_seed = 7;
  long truth_points = 2000;
  long rate_points = 500;
  double ne_eps_d = 0.05;
  double ne_eps_jsd = 0.05;
};

struct ExperimentConfig {
  std::vector<int> fig3_blocks{5, 10, 15};
  std::vector<int> fig4_fleet_sizes{5, 10, 15};
  int fig4_blocks = 15;
  std::vector<std::string> jsd_schemes{"distributed", "standalone", "centralized", "parameter_averaging"};
  std::vector<int> overhead_blocks{5, 10, 15};
  long overhead_iterations = 100;
  std::vector<int> rate_fleet_sizes{5};
  double rate_floor = 0.9;
};

/// Fully resolved scenario; every field has the reference default.
struct ScenarioConfig {
  FleetConfig fleet;
  RadioConfig radio;
  ConvergenceConfig convergence;
  SharingConfig sharing;
  LearnerSection learner;
  TrainingSection training;
  ExperimentConfig experiments;

  convergence::GammaSchedule gamma_schedule() const {
    if (convergence.gamma == "unit") return convergence::GammaSchedule::unit();
    if (convergence.gamma == "linear")
      return convergence::GammaSchedule::linear(convergence.gamma_slope, convergence.gamma_cap);
    return convergence::GammaSchedule::saturating(convergence.gamma_ramp);
  }

  learner::LearnerConfig learner_config() const {
    learner::LearnerConfig c;
    c.directions = radio.directions;
    c.noise_dim = learner.noise_dim;
    c.hidden = learner.hidden;
    c.leaky_slope = learner.leaky_slope;
    c.lr_disc = learner.lr_disc;
    c.lr_gen = learner.lr_gen;
    c.optimizer = learner.optimizer == "sgd" ? learner::Optimizer::Kind::Sgd : learner::Optimizer::Kind::Adam;
    c.momentum = learner.momentum;
    c.beta1 = learner.beta1;
    c.beta2 = learner.beta2;
    c.gen_loss = learner.gen_loss == "literal" ? learner::GenLoss::Literal : learner::GenLoss::NonSaturating;
    return c;
  }
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& path, const std::string& why) {
  fail(ErrorKind::ConfigInvalid, path + ": " + why);
}

/// Reads the mapping `node` into fields, rejecting keys no field claims.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) invalid(path_, "expected a mapping");
  }

  template <typename T>
  Section& field(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return *this;
    const YAML::Node v = node_[key];
    if (!v) return *this;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      invalid(path_ + "." + key, "wrong type");
    }
    return *this;
  }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return YAML::Node();
    return node_[key];
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) invalid(path_.empty() ? key : path_ + "." + key, "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& path, const std::string& why) {
  if (!ok) invalid(path, why);
}

}  // namespace detail

inline void validate(const ScenarioConfig& c) {
  using detail::check;
  const auto& f = c.fleet;
  check(f.size >= 2, "fleet.size", "fleet needs at least two UAVs");
  check(f.resource_blocks >= f.size, "fleet.resource_blocks", "must be at least fleet.size");
  check(f.distances_m.size() == f.azimuths_deg.size(), "fleet.azimuths_deg", "needs one entry per distance");
  check(f.distances_m.empty() || static_cast<int>(f.distances_m.size()) >= f.size, "fleet.distances_m",
        "fewer positions than fleet.size");
  check(f.ground_station.size() == 3, "fleet.ground_station", "expected [x, y, z]");
  check(f.orbit_period_s > 0 && f.sample_interval_s > 0 && f.orbit_radius_m >= 0, "fleet.orbit_period_s",
        "orbit parameters must be positive");
  for (int b : c.experiments.fig3_blocks) check(b >= f.size, "experiments.fig3_blocks", "each count must be >= fleet.size");
  for (int g : c.experiments.fig4_fleet_sizes)
    check(g >= 2 && c.experiments.fig4_blocks >= g, "experiments.fig4_fleet_sizes", "sizes must lie in [2, fig4_blocks]");
  for (int b : c.experiments.overhead_blocks) check(b >= f.size, "experiments.overhead_blocks", "each count must be >= fleet.size");
  const auto& r = c.radio;
  check(r.tx_antennas >= 1, "radio.tx_antennas", "must be positive");
  check(r.rx_antennas >= 1, "radio.rx_antennas", "must be positive");
  check(r.directions >= 1, "radio.directions", "must be at least 1");
  for (double v : {r.carrier_frequency_hz, r.bandwidth_hz, r.max_power_dbm, r.link_tx_power_dbm, r.noise_dbm_hz,
                   r.snr_threshold_db, r.pathloss_exponent, r.pilot_power_dbm})
    check(std::isfinite(v), "radio", "all powers, rates and frequencies must be finite");
  check(r.carrier_frequency_hz > 0 && r.bandwidth_hz > 0, "radio.bandwidth_hz", "must be positive");
  const auto& v = c.convergence;
  check(v.training_error >= 0 && v.training_error <= 1, "convergence.training_error", "must lie in [0, 1]");
  check(v.target_probability >= 0 && v.target_probability < 1, "convergence.target_probability", "must lie in [0, 1)");
  check(v.gamma == "unit" || v.gamma == "linear" || v.gamma == "saturating", "convergence.gamma",
        "expected unit, linear or saturating");
  check(v.gamma_ramp >= 1, "convergence.gamma_ramp", "must be at least 1");
  check(v.max_iterations >= 1, "convergence.max_iterations", "must be at least 1");
  check(v.oracle_trials >= 1, "convergence.oracle_trials", "must be at least 1");
  const auto& s = c.sharing;
  check(s.eta >= 0 && s.eta <= 1, "sharing.eta", "must lie in [0, 1]");
  check(s.rho >= 0 && std::isfinite(s.rho), "sharing.rho", "must be finite and nonnegative");
  check(s.dataset_size >= 1, "sharing.dataset_size", "must be positive");
  check(s.slot_s > 0, "sharing.slot_s", "must be positive");
  const auto& l = c.learner;
  check(l.noise_dim >= 1, "learner.noise_dim", "must be positive");
  for (int h : l.hidden) check(h >= 1, "learner.hidden", "layer sizes must be positive");
  check(l.optimizer == "adam" || l.optimizer == "sgd", "learner.optimizer", "expected adam or sgd");
  check(l.gen_loss == "non_saturating" || l.gen_loss == "literal", "learner.gen_loss",
        "expected non_saturating or literal");
  check(l.batch_size >= 1, "learner.batch_size", "must be positive");
  check(l.local_steps >= 1, "learner.local_steps", "must be positive");
  const auto& t = c.training;
  check(t.rounds >= 1, "training.rounds", "must be positive");
  check(t.eval_every >= 0, "training.eval_every", "must be nonnegative");
  check(t.eval_samples >= 1 && t.truth_points >= 1 && t.rate_points >= 1, "training.eval_samples",
        "sample counts must be positive");
  check(!t.seeds.empty(), "training.seeds", "need at least one seed");
  check(t.averaging_period >= 1, "training.averaging_period", "must be positive");
}

inline ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::ConfigInvalid, std::string("parse error: ") + e.what());
  }
  ScenarioConfig c;
  detail::Section top(root, "");
  {
    auto& f = c.fleet;
    detail::Section s(top.child("fleet"), "fleet");
    s.field("size", f.size).field("resource_blocks", f.resource_blocks).field("distances_m", f.distances_m)
        .field("azimuths_deg", f.azimuths_deg).field("base_distance_m", f.base_distance_m)
        .field("distance_step_m", f.distance_step_m).field("azimuth_step_deg", f.azimuth_step_deg)
        .field("altitude_m", f.altitude_m).field("ground_station", f.ground_station)
        .field("orbit_radius_m", f.orbit_radius_m).field("orbit_period_s", f.orbit_period_s)
        .field("sample_interval_s", f.sample_interval_s).field("fill_budget", f.fill_budget).finish();
  }
  {
    auto& r = c.radio;
    detail::Section s(top.child("radio"), "radio");
    s.field("tx_antennas", r.tx_antennas).field("rx_antennas", r.rx_antennas).field("directions", r.directions)
        .field("carrier_frequency_hz", r.carrier_frequency_hz).field("bandwidth_hz", r.bandwidth_hz)
        .field("max_power_dbm", r.max_power_dbm).field("link_tx_power_dbm", r.link_tx_power_dbm)
        .field("noise_dbm_hz", r.noise_dbm_hz).field("snr_threshold_db", r.snr_threshold_db)
        .field("pathloss_exponent", r.pathloss_exponent).field("rician_k_db", r.rician_k_db)
        .field("rician_k_spread_db", r.rician_k_spread_db).field("pilot_power_dbm", r.pilot_power_dbm).finish();
  }
  {
    auto& v = c.convergence;
    detail::Section s(top.child("convergence"), "convergence");
    s.field("training_error", v.training_error).field("target_probability", v.target_probability)
        .field("gamma", v.gamma).field("gamma_ramp", v.gamma_ramp).field("gamma_slope", v.gamma_slope)
        .field("gamma_cap", v.gamma_cap).field("max_iterations", v.max_iterations)
        .field("oracle_trials", v.oracle_trials).finish();
  }
  {
    auto& v = c.sharing;
    detail::Section s(top.child("sharing"), "sharing");
    s.field("slot_s", v.slot_s).field("eta", v.eta).field("rho", v.rho).field("dataset_size", v.dataset_size)
        .field("local_train_time_s", v.local_train_time_s).finish();
  }
  {
    auto& l = c.learner;
    detail::Section s(top.child("learner"), "learner");
    s.field("noise_dim", l.noise_dim).field("hidden", l.hidden).field("leaky_slope", l.leaky_slope)
        .field("optimizer", l.optimizer).field("lr_disc", l.lr_disc).field("lr_gen", l.lr_gen)
        .field("momentum", l.momentum).field("beta1", l.beta1).field("beta2", l.beta2).field("gen_loss", l.gen_loss)
        .field("batch_size", l.batch_size).field("local_steps", l.local_steps).finish();
  }
  {
    auto& t = c.training;
    detail::Section s(top.child("training"), "training");
    s.field("rounds", t.rounds).field("eval_every", t.eval_every).field("eval_samples", t.eval_samples)
        .field("averaging_period", t.averaging_period).field("seeds", t.seeds).field("field_seed", t.field_seed)
        .field("truth_points", t.truth_points).field("rate_points", t.rate_points).field("ne_eps_d", t.ne_eps_d)
        .field("ne_eps_jsd", t.ne_eps_jsd).finish();
  }
  {
    auto& e = c.experiments;
    detail::Section s(top.child("experiments"), "experiments");
    s.field("fig3_blocks", e.fig3_blocks).field("fig4_fleet_sizes", e.fig4_fleet_sizes)
        .field("fig4_blocks", e.fig4_blocks).field("jsd_schemes", e.jsd_schemes)
        .field("overhead_blocks", e.overhead_blocks).field("overhead_iterations", e.overhead_iterations)
        .field("rate_fleet_sizes", e.rate_fleet_sizes).field("rate_floor", e.rate_floor).finish();
  }
  top.finish();
  validate(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ConfigNotFound, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace detail {

template <typename T>
std::string yaml_list(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    if constexpr (std::is_same_v<T, double>)
      s += csv::format_double(v[k]);
    else if constexpr (std::is_same_v<T, std::string>)
      s += v[k];
    else
      s += std::to_string(v[k]);
  }
  return s + "]";
}

inline std::string num(double v) { return csv::format_double(v); }

}  // namespace detail

/// The resolved configuration in the input format; loading it back reproduces `c` exactly.
inline std::string config_snapshot(const ScenarioConfig& c) {
  using detail::num;
  using detail::yaml_list;
  std::ostringstream o;
  const auto& f = c.fleet;
  o << "fleet:\n"
    << "  size: " << f.size << "\n  resource_blocks: " << f.resource_blocks
    << "\n  distances_m: " << yaml_list(f.distances_m) << "\n  azimuths_deg: " << yaml_list(f.azimuths_deg)
    << "\n  base_distance_m: " << num(f.base_distance_m) << "\n  distance_step_m: " << num(f.distance_step_m)
    << "\n  azimuth_step_deg: " << num(f.azimuth_step_deg) << "\n  altitude_m: " << num(f.altitude_m)
    << "\n  ground_station: " << yaml_list(f.ground_station) << "\n  orbit_radius_m: " << num(f.orbit_radius_m)
    << "\n  orbit_period_s: " << num(f.orbit_period_s) << "\n  sample_interval_s: " << num(f.sample_interval_s)
    << "\n  fill_budget: " << (f.fill_budget ? "true" : "false") << "\n";
  const auto& r = c.radio;
  o << "radio:\n"
    << "  tx_antennas: " << r.tx_antennas << "\n  rx_antennas: " << r.rx_antennas << "\n  directions: " << r.directions
    << "\n  carrier_frequency_hz: " << num(r.carrier_frequency_hz) << "\n  bandwidth_hz: " << num(r.bandwidth_hz)
    << "\n  max_power_dbm: " << num(r.max_power_dbm) << "\n  link_tx_power_dbm: " << num(r.link_tx_power_dbm)
    << "\n  noise_dbm_hz: " << num(r.noise_dbm_hz) << "\n  snr_threshold_db: " << num(r.snr_threshold_db)
    << "\n  pathloss_exponent: " << num(r.pathloss_exponent) << "\n  rician_k_db: " << num(r.rician_k_db)
    << "\n  rician_k_spread_db: " << num(r.rician_k_spread_db) << "\n  pilot_power_dbm: " << num(r.pilot_power_dbm)
    << "\n";
  const auto& v = c.convergence;
  o << "convergence:\n"
    << "  training_error: " << num(v.training_error) << "\n  target_probability: " << num(v.target_probability)
    << "\n  gamma: " << v.gamma << "\n  gamma_ramp: " << v.gamma_ramp << "\n  gamma_slope: " << num(v.gamma_slope)
    << "\n  gamma_cap: " << num(v.gamma_cap) << "\n  max_iterations: " << v.max_iterations
    << "\n  oracle_trials: " << v.oracle_trials << "\n";
  const auto& s = c.sharing;
  o << "sharing:\n"
    << "  slot_s: " << num(s.slot_s) << "\n  eta: " << num(s.eta) << "\n  rho: " << num(s.rho)
    << "\n  dataset_size: " << s.dataset_size << "\n  local_train_time_s: " << num(s.local_train_time_s) << "\n";
  const auto& l = c.learner;
  o << "learner:\n"
    << "  noise_dim: " << l.noise_dim << "\n  hidden: " << yaml_list(l.hidden) << "\n  leaky_slope: " << num(l.leaky_slope)
    << "\n  optimizer: " << l.optimizer << "\n  lr_disc: " << num(l.lr_disc) << "\n  lr_gen: " << num(l.lr_gen)
    << "\n  momentum: " << num(l.momentum) << "\n  beta1: " << num(l.beta1) << "\n  beta2: " << num(l.beta2)
    << "\n  gen_loss: " << l.gen_loss << "\n  batch_size: " << l.batch_size << "\n  local_steps: " << l.local_steps
    << "\n";
  const auto& t = c.training;
  o << "training:\n"
    << "  rounds: " << t.rounds << "\n  eval_every: " << t.eval_every << "\n  eval_samples: " << t.eval_samples
    << "\n  averaging_period: " << t.averaging_period << "\n  seeds: " << yaml_list(t.seeds)
    << "\n  field_seed: " << t.field_seed << "\n  truth_points: " << t.truth_points
    << "\n  rate_points: " << t.rate_points << "\n  ne_eps_d: " << num(t.ne_eps_d)
    << "\n  ne_eps_jsd: " << num(t.ne_eps_jsd) << "\n";
  const auto& e = c.experiments;
  o << "experiments:\n"
    << "  fig3_blocks: " << yaml_list(e.fig3_blocks) << "\n  fig4_fleet_sizes: " << yaml_list(e.fig4_fleet_sizes)
    << "\n  fig4_blocks: " << e.fig4_blocks << "\n  jsd_schemes: " << yaml_list(e.jsd_schemes)
    << "\n  overhead_blocks: " << yaml_list(e.overhead_blocks) << "\n  overhead_iterations: " << e.overhead_iterations
    << "\n  rate_fleet_sizes: " << yaml_list(e.rate_fleet_sizes) << "\n  rate_floor: " << num(e.rate_floor) << "\n";
  return o.str();
}

}  // namespace uavcgan::cli
