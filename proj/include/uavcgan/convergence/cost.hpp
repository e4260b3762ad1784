#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "uavcgan/core/error.hpp"

namespace uavcgan::convergence {

struct TimingParams {
  double share_slot = 0.01;        // t_Th
  double local_train_time = 0.01;  // t_fx
  long iterations_gen = 1;
  long iterations_disc = 1;
};

enum class TimeModel {
  Product,  // (t_Th + t_fx) * I_G * I_D, as written
  Max,      // (t_Th + t_fx) * max(I_G, I_D)
};

inline double convergence_time(const TimingParams& t, TimeModel model = TimeModel::Product) {
  require(t.share_slot >= 0.0 && t.local_train_time >= 0.0 && t.iterations_gen >= 0 && t.iterations_disc >= 0,
          ErrorKind::InvalidArgument, "timing parameters must be nonnegative");
  const double slot = t.share_slot + t.local_train_time;
  if (model == TimeModel::Max) return slot * static_cast<double>(std::max(t.iterations_gen, t.iterations_disc));
  return slot * static_cast<double>(t.iterations_gen) * static_cast<double>(t.iterations_disc);
}

/// Samples one node publishes per round: ceil(eta * H_g), robust to eta*H landing a hair above an integer.
inline std::int64_t share_quota(double eta, double dataset_size) {
  require(eta >= 0.0 && dataset_size >= 0.0, ErrorKind::InvalidArgument, "quota inputs must be nonnegative");
  const double x = eta * dataset_size;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

/// Load = I_tr * sum_g eta H_g rho Q_g, with eta H_g realised as the integer quota.
inline double communication_load(long iterations, double eta, const std::vector<double>& dataset_sizes, double rho,
                                 const std::vector<int>& out_degrees) {
  require(iterations >= 0 && rho >= 0.0, ErrorKind::InvalidArgument, "load inputs must be nonnegative");
  require(dataset_sizes.size() == out_degrees.size(), ErrorKind::ShapeMismatch,
          "dataset sizes and out-degrees differ in length");
  std::int64_t per_round = 0;
  for (std::size_t g = 0; g < dataset_sizes.size(); ++g) {
    require(out_degrees[g] >= 0, ErrorKind::InvalidArgument, "negative out-degree");
    per_round += share_quota(eta, dataset_sizes[g]) * out_degrees[g];
  }
  return static_cast<double>(iterations) * static_cast<double>(per_round) * rho;
}

}  // namespace uavcgan::convergence
