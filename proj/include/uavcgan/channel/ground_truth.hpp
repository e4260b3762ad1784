#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "uavcgan/channel/array.hpp"
#include "uavcgan/core/error.hpp"
#include "uavcgan/core/random.hpp"

namespace uavcgan::channel {

using Vec3 = Eigen::Vector3d;

/// Synthetic stand-in for the unknown true gain distribution: log-distance path loss, a
/// 3GPP-style parabolic beam pattern around the geometric bearing, and per-direction
/// Rician fading. Every draw is a pure function of (rng_seed, inputs).
struct GroundTruthField {
  double pathloss_exponent = 2.0;
  double reference_gain_db = 0.0;  // path gain at 1 m
  std::vector<double> rician_k_db;  // one per direction; +inf disables fading
  std::vector<double> los_phase;    // one per direction, radians
  double carrier_frequency = 30e9;
  std::uint64_t rng_seed = 0;
  double beamwidth = 0.0;  // 3 dB width, radians
  double max_attenuation_db = 30.0;

  std::size_t directions() const { return rician_k_db.size(); }
};

/// Free-space path gain at 1 m for the carrier, in dB (negative).
inline double reference_gain_db_for(double carrier_frequency) {
  constexpr double c = 299792458.0;
  return -20.0 * std::log10(4.0 * std::numbers::pi * carrier_frequency / c);
}

/// Builds a field whose per-direction K-factors spread uniformly in [k_mean - k_spread, k_mean + k_spread] dB.
inline GroundTruthField make_ground_truth_field(std::size_t directions, double carrier_frequency,
                                                double pathloss_exponent, std::uint64_t seed,
                                                double k_mean_db = 10.0, double k_spread_db = 3.0) {
  require(directions >= 1, ErrorKind::InvalidArgument, "field needs at least one direction");
  GroundTruthField field;
  field.pathloss_exponent = pathloss_exponent;
  field.reference_gain_db = reference_gain_db_for(carrier_frequency);
  field.carrier_frequency = carrier_frequency;
  field.rng_seed = seed;
  field.beamwidth = 2.0 * std::numbers::pi / static_cast<double>(directions);
  Rng rng = make_stream(seed, 0xF1E1DULL);
  for (std::size_t i = 0; i < directions; ++i) {
    field.rician_k_db.push_back(k_mean_db + k_spread_db * (2.0 * uniform01(rng) - 1.0));
    field.los_phase.push_back(2.0 * std::numbers::pi * uniform01(rng));
  }
  return field;
}

inline double distance(const Vec3& u, const Vec3& v) { return (u - v).norm(); }

/// Deterministic large-scale path gain (linear power) at distance d.
inline double path_gain(const GroundTruthField& field, double d) {
  require(d > 0.0, ErrorKind::DegenerateGeometry, "zero link distance");
  return std::pow(10.0, (field.reference_gain_db - 10.0 * field.pathloss_exponent * std::log10(d)) / 10.0);
}

/// Horizontal bearing of the UAV seen from the ground station, in [0, 2pi).
inline double bearing(const Vec3& u, const Vec3& v) {
  double a = std::atan2(u.y() - v.y(), u.x() - v.x());
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

inline double wrapped_difference(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return d > std::numbers::pi ? 2.0 * std::numbers::pi - d : d;
}

inline double beam_pattern_db(const GroundTruthField& field, int direction_index, const Vec3& u, const Vec3& v) {
  const double steer = grid_angle(static_cast<std::size_t>(direction_index - 1), field.directions());
  const double off = wrapped_difference(steer, bearing(u, v)) / field.beamwidth;
  return -std::min(12.0 * off * off, field.max_attenuation_db);
}

/// Power of the deterministic line-of-sight component for one direction.
inline double los_power(const GroundTruthField& field, const Vec3& u, const Vec3& v, int direction_index) {
  return path_gain(field, distance(u, v)) * std::pow(10.0, beam_pattern_db(field, direction_index, u, v) / 10.0);
}

namespace detail {
inline std::uint64_t hash_inputs(std::uint64_t seed, const Vec3& u, const Vec3& v, double t, int dir) {
  std::uint64_t h = splitmix64(seed);
  const double values[] = {u.x(), u.y(), u.z(), v.x(), v.y(), v.z(), t};
  for (double x : values) h = mix_seed(h, std::bit_cast<std::uint64_t>(x));
  return mix_seed(h, static_cast<std::uint64_t>(dir));
}
}  // namespace detail

inline cdouble true_gain(const GroundTruthField& field, const Vec3& u, const Vec3& v, double t, int direction_index) {
  require(direction_index >= 1 && static_cast<std::size_t>(direction_index) <= field.directions(),
          ErrorKind::InvalidArgument, "direction index outside field");
  require(distance(u, v) > 0.0, ErrorKind::DegenerateGeometry, "UAV and ground station coincide");
  const auto d = static_cast<std::size_t>(direction_index - 1);
  const double amplitude = std::sqrt(los_power(field, u, v, direction_index));
  cdouble g = std::polar(1.0, field.los_phase[d]);
  const double k_db = field.rician_k_db[d];
  if (std::isfinite(k_db)) {
    Rng rng(detail::hash_inputs(field.rng_seed, u, v, t, direction_index));
    const double scatter_std = std::sqrt(std::pow(10.0, -k_db / 10.0) / 2.0);
    const double re = standard_normal(rng);
    const double im = standard_normal(rng);
    g += scatter_std * cdouble(re, im);
  }
  return amplitude * g;
}

}  // namespace uavcgan::channel
