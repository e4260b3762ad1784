#pragma once

#include <cmath>
#include <numbers>

#include "uavcgan/core/error.hpp"

namespace uavcgan::topology {

inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// One directed air-to-air link. Powers in dBm, losses in dB.
struct LinkBudget {
  double tx_power_dbm = 0.0;
  double path_loss_db = 0.0;
  double noise_power_dbm = 0.0;
  double bandwidth_hz = 1.0;
  double snr_threshold_db = 0.0;
  double share_deadline_s = 0.0;

  double snr_db() const { return tx_power_dbm - path_loss_db - noise_power_dbm; }
  double snr_linear() const { return db_to_linear(snr_db()); }
  bool meets_threshold() const { return snr_db() >= snr_threshold_db; }
};

/// C_R = w_b log2(1 + SNR), bits per second.
inline double shannon_rate(const LinkBudget& budget) {
  require(budget.bandwidth_hz > 0.0, ErrorKind::InvalidArgument, "bandwidth must be positive");
  return budget.bandwidth_hz * std::log2(1.0 + budget.snr_linear());
}

inline double shannon_rate(double bandwidth_hz, double snr_linear) {
  return bandwidth_hz * std::log2(1.0 + snr_linear);
}

inline double free_space_path_loss(double distance, double frequency) {
  require(distance > 0.0, ErrorKind::DegenerateGeometry, "distance must be positive");
  require(frequency > 0.0, ErrorKind::InvalidArgument, "frequency must be positive");
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance * frequency / kSpeedOfLight);
}

/// Free-space loss at 1 m followed by a log-distance slope; exponent 2 reproduces free space.
inline double path_loss_db(double distance, double frequency, double exponent = 2.0) {
  require(distance > 0.0, ErrorKind::DegenerateGeometry, "distance must be positive");
  return free_space_path_loss(1.0, frequency) + 10.0 * exponent * std::log10(distance);
}

}  // namespace uavcgan::topology
