#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "uavcgan/channel/estimation.hpp"
#include "uavcgan/channel/ground_truth.hpp"
#include "uavcgan/core/csv.hpp"

namespace uavcgan::channel {

/// One CSI record h_n = {u, v, t, A~, direction}.
struct ChannelSample {
  Vec3 u = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double t = 0.0;
  cdouble gain_estimate;
  int direction_index = 1;

  bool operator==(const ChannelSample&) const = default;
};

struct TrajectoryPoint {
  Vec3 u;
  Vec3 v;
  double t;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Circular orbit around `center` at constant altitude, sampled every `dt` seconds.
inline Trajectory orbit_trajectory(const Vec3& center, double radius, double period, const Vec3& ground_station,
                                   std::size_t num_points, double dt, double phase = 0.0) {
  Trajectory traj;
  traj.reserve(num_points);
  for (std::size_t n = 0; n < num_points; ++n) {
    const double t = dt * static_cast<double>(n);
    const double a = phase + 2.0 * std::numbers::pi * t / period;
    traj.push_back({center + Vec3(radius * std::cos(a), radius * std::sin(a), 0.0), ground_station, t});
  }
  return traj;
}

/// Sweeps every codebook direction at every trajectory point: |result| = |trajectory| * I.
inline std::vector<ChannelSample> collect_dataset(const GroundTruthField& field, const Codebook& codebook,
                                                  const Trajectory& trajectory, double pilot_power,
                                                  double noise_power, Rng& rng) {
  require(!trajectory.empty(), ErrorKind::EmptyTrajectory, "trajectory has no points");
  require(field.directions() == codebook.size(), ErrorKind::ShapeMismatch,
          "field and codebook disagree on the number of directions");
  std::vector<ChannelSample> out;
  out.reserve(trajectory.size() * codebook.size());
  for (const auto& p : trajectory) {
    for (std::size_t i = 0; i < codebook.size(); ++i) {
      const int dir = static_cast<int>(i) + 1;
      const auto& entry = codebook.pairs[i];
      const auto channel = make_channel(true_gain(field, p.u, p.v, p.t, dir), entry.aod, entry.aoa,
                                        codebook.tx_elements, codebook.rx_elements);
      const cdouble y = received_pilot(entry.beamforming, entry.combining, channel, pilot_power, noise_power, rng);
      out.push_back({p.u, p.v, p.t, estimate_gain(y, entry.beamforming, entry.combining, entry, pilot_power), dir});
    }
  }
  return out;
}

inline constexpr const char* kDatasetHeader = "u_x,u_y,u_z,v_x,v_y,v_z,t,gain_re,gain_im,dir_index";

inline std::string dataset_to_csv(const std::vector<ChannelSample>& samples) {
  std::string text = std::string(kDatasetHeader) + "\n";
  for (const auto& s : samples) {
    csv::Row row;
    row << s.u.x() << s.u.y() << s.u.z() << s.v.x() << s.v.y() << s.v.z() << s.t << s.gain_estimate.real()
        << s.gain_estimate.imag() << s.direction_index;
    text += row.str() + "\n";
  }
  return text;
}

inline std::vector<ChannelSample> dataset_from_csv(const std::string& text) {
  const auto table = csv::parse_table(text);
  std::string header;
  for (std::size_t i = 0; i < table.header.size(); ++i) header += (i ? "," : "") + table.header[i];
  require(header == kDatasetHeader, ErrorKind::IoError, "unexpected dataset header: " + header);
  std::vector<ChannelSample> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    auto d = [&](std::size_t i) { return csv::parse_double(r[i]); };
    out.push_back({Vec3(d(0), d(1), d(2)), Vec3(d(3), d(4), d(5)), d(6), cdouble(d(7), d(8)),
                   static_cast<int>(csv::parse_int(r[9]))});
  }
  return out;
}

}  // namespace uavcgan::channel
