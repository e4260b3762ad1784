#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "uavcgan/core/error.hpp"

namespace uavcgan::channel {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Array response of a half-wavelength uniform linear array.
struct SteeringVector {
  double angle = 0.0;
  CVector entries;

  std::size_t size() const { return static_cast<std::size_t>(entries.size()); }
};

inline SteeringVector steering_vector(double angle, std::size_t num_elements) {
  require(num_elements >= 1, ErrorKind::InvalidAntennaCount, "steering vector needs at least one element");
  SteeringVector sv{angle, CVector(static_cast<Eigen::Index>(num_elements))};
  const double phase_step = std::numbers::pi * std::sin(angle);
  sv.entries[0] = cdouble(1.0, 0.0);
  for (std::size_t k = 1; k < num_elements; ++k)
    sv.entries[static_cast<Eigen::Index>(k)] = std::polar(1.0, static_cast<double>(k) * phase_step);
  return sv;
}

/// Single-path channel, stored receive-by-transmit (K x L) so that y = f^H H e.
struct ChannelMatrix {
  CMatrix entries;
  cdouble gain;
  double aod = 0.0;
  double aoa = 0.0;

  std::size_t tx_elements() const { return static_cast<std::size_t>(entries.cols()); }
  std::size_t rx_elements() const { return static_cast<std::size_t>(entries.rows()); }
};

inline ChannelMatrix make_channel(cdouble gain, double aod, double aoa, std::size_t tx_elements,
                                  std::size_t rx_elements) {
  const auto tx = steering_vector(aod, tx_elements);
  const auto rx = steering_vector(aoa, rx_elements);
  return ChannelMatrix{gain * rx.entries * tx.entries.adjoint(), gain, aod, aoa};
}

struct CodebookEntry {
  CVector beamforming;  // e_i, L entries
  CVector combining;    // f_i, K entries
  double aod = 0.0;
  double aoa = 0.0;
};

/// I beam pairs on a uniform angular grid; direction indices are 1-based.
struct Codebook {
  std::vector<CodebookEntry> pairs;
  std::size_t tx_elements = 0;
  std::size_t rx_elements = 0;

  std::size_t size() const { return pairs.size(); }

  const CodebookEntry& at(int direction_index) const {
    require(direction_index >= 1 && static_cast<std::size_t>(direction_index) <= pairs.size(),
            ErrorKind::InvalidArgument, "direction index " + std::to_string(direction_index) + " outside codebook");
    return pairs[static_cast<std::size_t>(direction_index - 1)];
  }
};

inline double grid_angle(std::size_t zero_based_index, std::size_t directions) {
  return 2.0 * std::numbers::pi * static_cast<double>(zero_based_index) / static_cast<double>(directions);
}

inline Codebook make_codebook(std::size_t directions, std::size_t tx_elements, std::size_t rx_elements) {
  require(directions >= 1, ErrorKind::InvalidArgument, "codebook needs at least one direction");
  Codebook cb;
  cb.tx_elements = tx_elements;
  cb.rx_elements = rx_elements;
  cb.pairs.reserve(directions);
  const double tx_norm = std::sqrt(static_cast<double>(tx_elements));
  const double rx_norm = std::sqrt(static_cast<double>(rx_elements));
  for (std::size_t i = 0; i < directions; ++i) {
    const double angle = grid_angle(i, directions);
    cb.pairs.push_back(CodebookEntry{steering_vector(angle, tx_elements).entries / tx_norm,
                                     steering_vector(angle, rx_elements).entries / rx_norm, angle, angle});
  }
  return cb;
}

}  // namespace uavcgan::channel
