#pragma once

#include <cmath>
#include <string>

#include "uavcgan/channel/array.hpp"
#include "uavcgan/core/error.hpp"
#include "uavcgan/core/random.hpp"

namespace uavcgan::channel {

/// y = sqrt(P) f^H H e + f^H n, with n ~ CN(0, noise_power I).
inline cdouble received_pilot(const CVector& beamforming, const CVector& combining, const ChannelMatrix& channel,
                              double pilot_power, double noise_power, Rng& rng) {
  require(static_cast<std::size_t>(beamforming.size()) == channel.tx_elements() &&
              static_cast<std::size_t>(combining.size()) == channel.rx_elements(),
          ErrorKind::ShapeMismatch,
          "beam pair (" + std::to_string(beamforming.size()) + ", " + std::to_string(combining.size()) +
              ") does not match channel " + std::to_string(channel.rx_elements()) + "x" +
              std::to_string(channel.tx_elements()));
  require(pilot_power > 0.0, ErrorKind::InvalidArgument, "pilot power must be positive");
  require(noise_power >= 0.0, ErrorKind::InvalidArgument, "noise power must be nonnegative");
  cdouble y = std::sqrt(pilot_power) * combining.dot(channel.entries * beamforming);
  if (noise_power > 0.0) {
    const double s = std::sqrt(noise_power / 2.0);
    CVector noise(combining.size());
    for (Eigen::Index k = 0; k < noise.size(); ++k) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      noise[k] = s * cdouble(re, im);
    }
    y += combining.dot(noise);  // dot() conjugates the first operand
  }
  return y;
}

/// Inverts the known beam-pair response of a codebook entry: A~ = y / (sqrt(P) f^H b_p(aoa) b_q(aod)^H e).
inline cdouble estimate_gain(cdouble pilot_symbol, const CVector& beamforming, const CVector& combining,
                             const CodebookEntry& entry, double pilot_power) {
  require(pilot_power > 0.0, ErrorKind::InvalidArgument, "pilot power must be positive");
  const auto rx = steering_vector(entry.aoa, static_cast<std::size_t>(combining.size()));
  const auto tx = steering_vector(entry.aod, static_cast<std::size_t>(beamforming.size()));
  const cdouble response = std::sqrt(pilot_power) * combining.dot(rx.entries) * tx.entries.dot(beamforming);
  require(std::abs(response) >= 1e-12, ErrorKind::IllConditionedBeamPair,
          "beam pair response magnitude " + std::to_string(std::abs(response)));
  return pilot_symbol / response;
}

}  // namespace uavcgan::channel
