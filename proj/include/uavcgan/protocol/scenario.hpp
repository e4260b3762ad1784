#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "uavcgan/channel/dataset.hpp"
#include "uavcgan/learner/metrics.hpp"
#include "uavcgan/topology/link.hpp"

namespace uavcgan::protocol {

using cdouble = std::complex<double>;

/// A node's local CSI: one complex gain estimate and its direction per record.
struct NodeDataset {
  std::vector<cdouble> gains;
  std::vector<int> dirs;

  std::size_t size() const { return gains.size(); }

  static NodeDataset from_samples(const std::vector<channel::ChannelSample>& samples) {
    NodeDataset d;
    for (const auto& s : samples) {
      d.gains.push_back(s.gain_estimate);
      d.dirs.push_back(s.direction_index);
    }
    return d;
  }

  static NodeDataset pooled(const std::vector<NodeDataset>& parts) {
    NodeDataset d;
    for (const auto& p : parts) {
      d.gains.insert(d.gains.end(), p.gains.begin(), p.gains.end());
      d.dirs.insert(d.dirs.end(), p.dirs.begin(), p.dirs.end());
    }
    return d;
  }
};

/// Where each UAV flies relative to the ground station.
struct FleetGeometry {
  channel::Vec3 ground_station{0.0, 0.0, 10.0};
  std::vector<channel::Vec3> orbit_centers;
  double orbit_radius = 20.0;
  double orbit_period = 60.0;
  double sample_interval = 0.05;

  int num_nodes() const { return static_cast<int>(orbit_centers.size()); }

  /// Centres at the given ground distances and azimuths (degrees), all at `altitude`.
  static FleetGeometry from_polar(const std::vector<double>& distances, const std::vector<double>& azimuths_deg,
                                  double altitude) {
    require(distances.size() == azimuths_deg.size() && !distances.empty(), ErrorKind::ShapeMismatch,
            "need one azimuth per node distance");
    FleetGeometry g;
    for (std::size_t k = 0; k < distances.size(); ++k) {
      const double a = azimuths_deg[k] * std::numbers::pi / 180.0;
      g.orbit_centers.emplace_back(distances[k] * std::cos(a), distances[k] * std::sin(a), altitude);
    }
    return g;
  }

  /// Trajectory of node g; `time_offset` selects a disjoint stretch of the same orbit.
  channel::Trajectory trajectory(int g, std::size_t points, double time_offset = 0.0) const {
    const double phase = 2.0 * std::numbers::pi * (0.37 * g + time_offset / orbit_period);
    auto traj = channel::orbit_trajectory(orbit_centers.at(static_cast<std::size_t>(g)), orbit_radius, orbit_period,
                                          ground_station, points, sample_interval, phase);
    for (auto& p : traj) p.t += time_offset;
    return traj;
  }
};

/// Radio side of the data collection: the field, the codebook and the pilot budget.
struct ChannelSetup {
  channel::GroundTruthField field;
  channel::Codebook codebook;
  double pilot_power_w = 10.0;
  double noise_power_w = 0.0;

  int directions() const { return static_cast<int>(codebook.size()); }
};

/// Collects H_g records for node g (whole sweeps over the codebook, truncated to H_g).
inline NodeDataset collect_node_dataset(const ChannelSetup& setup, const FleetGeometry& geo, int g,
                                        std::size_t dataset_size, Rng& rng) {
  require(dataset_size > 0, ErrorKind::EmptyDataset, "dataset size must be positive");
  const std::size_t dirs = setup.codebook.size();
  const std::size_t points = (dataset_size + dirs - 1) / dirs;
  auto samples = channel::collect_dataset(setup.field, setup.codebook, geo.trajectory(g, points), setup.pilot_power_w,
                                          setup.noise_power_w, rng);
  samples.resize(dataset_size);
  return NodeDataset::from_samples(samples);
}

/// True gains of every direction on a fresh stretch of each node's orbit.
struct TruthSamples {
  std::vector<std::vector<channel::TrajectoryPoint>> points;  // per node
  std::vector<std::vector<std::vector<cdouble>>> gains;      // [node][point][direction]
};

inline TruthSamples sample_truth(const ChannelSetup& setup, const FleetGeometry& geo, std::size_t points_per_node,
                                 double time_offset) {
  TruthSamples t;
  for (int g = 0; g < geo.num_nodes(); ++g) {
    auto traj = geo.trajectory(g, points_per_node, time_offset);
    std::vector<std::vector<cdouble>> per_point;
    for (const auto& p : traj) {
      std::vector<cdouble> row;
      for (int i = 1; i <= setup.directions(); ++i) row.push_back(channel::true_gain(setup.field, p.u, p.v, p.t, i));
      per_point.push_back(std::move(row));
    }
    t.points.push_back(std::move(traj));
    t.gains.push_back(std::move(per_point));
  }
  return t;
}

/// The global target distribution: pooled truth of all nodes, in its own standardisation.
struct EvalReference {
  learner::Scaler scaler;
  std::vector<learner::Histogram2D> hist;
  int bins = 32;
  double range = 4.0;
};

inline EvalReference make_reference(const TruthSamples& truth, int directions, int bins = 32, double range = 4.0) {
  std::vector<cdouble> gains;
  std::vector<int> dirs;
  for (const auto& node : truth.gains)
    for (const auto& row : node)
      for (std::size_t i = 0; i < row.size(); ++i) {
        gains.push_back(row[i]);
        dirs.push_back(static_cast<int>(i) + 1);
      }
  EvalReference ref;
  ref.scaler = learner::Scaler::fit(gains, dirs, directions);
  ref.hist = learner::condition_histograms(gains, dirs, ref.scaler, bins, range);
  ref.bins = bins;
  ref.range = range;
  return ref;
}

/// Average JSD of a learner against the reference, from `per_direction` generated samples per condition.
inline double learner_jsd(const learner::LearnerState& s, const EvalReference& ref, std::size_t per_direction,
                          Rng& rng) {
  std::vector<int> dirs;
  for (int i = 1; i <= s.gen.directions; ++i) dirs.insert(dirs.end(), per_direction, i);
  const auto gains = learner::generate_gains(s, dirs, rng);
  return learner::average_jsd(learner::condition_histograms(gains, dirs, ref.scaler, ref.bins, ref.range), ref.hist);
}

/// Direction maximising the learner's mean generated |gain|^2.
inline int learned_best_direction(const learner::LearnerState& s, std::size_t per_direction, Rng& rng) {
  int best = 1;
  double best_power = -1.0;
  for (int i = 1; i <= s.gen.directions; ++i) {
    const auto gains = learner::generate_gains(s, std::vector<int>(per_direction, i), rng);
    double p = 0.0;
    for (const auto& g : gains) p += std::norm(g);
    if (p > best_power) {
      best_power = p;
      best = i;
    }
  }
  return best;
}

/// Downlink rate with beam pair `dir` under the true channel: the array gain L*K multiplies |A|^2.
inline double beam_rate(const ChannelSetup& setup, double tx_power_w, double noise_power_w, double bandwidth_hz,
                        cdouble true_gain) {
  const double array_gain = static_cast<double>(setup.codebook.tx_elements * setup.codebook.rx_elements);
  return topology::shannon_rate(bandwidth_hz, tx_power_w * std::norm(true_gain) * array_gain / noise_power_w);
}

struct RateResult {
  double learned = 0.0;  // mean over nodes and points
  double genie = 0.0;
  double ratio() const { return genie > 0.0 ? learned / genie : 0.0; }
};

/// Learned: one fixed beam per node from its model. Genie: the best true beam at every point.
inline RateResult rate_comparison(const ChannelSetup& setup, const TruthSamples& truth,
                                  const std::vector<int>& chosen_direction, double tx_power_w, double noise_power_w,
                                  double bandwidth_hz) {
  require(chosen_direction.size() == truth.gains.size(), ErrorKind::ShapeMismatch, "one beam choice per node");
  RateResult r;
  double n = 0.0;
  for (std::size_t g = 0; g < truth.gains.size(); ++g) {
    for (const auto& row : truth.gains[g]) {
      double best = 0.0;
      for (const auto& a : row) best = std::max(best, beam_rate(setup, tx_power_w, noise_power_w, bandwidth_hz, a));
      r.genie += best;
      r.learned += beam_rate(setup, tx_power_w, noise_power_w, bandwidth_hz,
                             row.at(static_cast<std::size_t>(chosen_direction[g] - 1)));
      n += 1.0;
    }
  }
  r.learned /= n;
  r.genie /= n;
  return r;
}

}  // namespace uavcgan::protocol
