#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "uavcgan/learner/gan.hpp"

namespace uavcgan::learner {

/// Square 2-D histogram over [lo, hi)^2. Points outside the range land in the border bins so no
/// probability mass is lost.
struct Histogram2D {
  int bins = 32;
  double lo = -4.0;
  double hi = 4.0;
  std::vector<double> mass;

  Histogram2D() : mass(static_cast<std::size_t>(bins * bins), 0.0) {}
  Histogram2D(int b, double l, double h) : bins(b), lo(l), hi(h), mass(static_cast<std::size_t>(b * b), 0.0) {
    require(b > 0 && h > l, ErrorKind::InvalidArgument, "histogram needs bins > 0 and hi > lo");
  }

  int index(double v) const {
    if (!(v == v)) return 0;
    const int k = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(k, 0, bins - 1);
  }

  void add(double x, double y, double w = 1.0) {
    mass[static_cast<std::size_t>(index(x) * bins + index(y))] += w;
  }

  double total() const {
    double t = 0.0;
    for (double m : mass) t += m;
    return t;
  }

  Histogram2D normalized() const {
    Histogram2D h = *this;
    const double t = total();
    require(t > 0.0, ErrorKind::EmptyDataset, "cannot normalise an empty histogram");
    for (double& m : h.mass) m /= t;
    return h;
  }

  bool same_binning(const Histogram2D& o) const { return bins == o.bins && lo == o.lo && hi == o.hi; }
};

/// Jensen-Shannon divergence in nats between two probability vectors of equal length.
inline double jsd(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), ErrorKind::ShapeMismatch, "distributions have different supports");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = 0.5 * (p[k] + q[k]);
    if (p[k] > 0.0) acc += 0.5 * p[k] * std::log(p[k] / m);
    if (q[k] > 0.0) acc += 0.5 * q[k] * std::log(q[k] / m);
  }
  return std::clamp(acc, 0.0, std::numbers::ln2);
}

inline double jsd(const Histogram2D& p, const Histogram2D& q) {
  require(p.same_binning(q), ErrorKind::ShapeMismatch, "histograms use different binnings");
  return jsd(std::span<const double>(p.mass), std::span<const double>(q.mass));
}

/// Per-condition histograms of physical gains, expressed in a common reference standardisation.
inline std::vector<Histogram2D> condition_histograms(const std::vector<std::complex<double>>& gains,
                                                     const std::vector<int>& dirs, const Scaler& reference,
                                                     int bins = 32, double range = 4.0) {
  require(gains.size() == dirs.size(), ErrorKind::ShapeMismatch, "gains and conditions differ in length");
  std::vector<Histogram2D> h(static_cast<std::size_t>(reference.directions()), Histogram2D(bins, -range, range));
  for (std::size_t k = 0; k < gains.size(); ++k) {
    const auto x = reference.standardize(gains[k], dirs[k]);
    h[static_cast<std::size_t>(dirs[k] - 1)].add(x[0], x[1]);
  }
  for (auto& hist : h) hist = hist.normalized();
  return h;
}

/// Mean over conditions of the per-condition JSD.
inline double average_jsd(const std::vector<Histogram2D>& p, const std::vector<Histogram2D>& q) {
  require(p.size() == q.size() && !p.empty(), ErrorKind::ShapeMismatch, "condition counts differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += jsd(p[k], q[k]);
  return acc / static_cast<double>(p.size());
}

/// Equilibrium test: discriminator indifferent (mean |D - 1/2| < eps_d) and learned close to truth.
inline bool ne_check(std::span<const double> disc_outputs, const Histogram2D& learned, const Histogram2D& truth,
                     double eps_d, double eps_jsd) {
  require(!disc_outputs.empty(), ErrorKind::EmptyDataset, "no discriminator outputs");
  double dev = 0.0;
  for (double d : disc_outputs) dev += std::abs(d - 0.5);
  dev /= static_cast<double>(disc_outputs.size());
  return dev < eps_d && jsd(learned, truth) < eps_jsd;
}

/// Condition-averaged variant: the divergence test uses the mean per-condition JSD.
inline bool ne_check(std::span<const double> disc_outputs, const std::vector<Histogram2D>& learned,
                     const std::vector<Histogram2D>& truth, double eps_d, double eps_jsd) {
  require(!disc_outputs.empty(), ErrorKind::EmptyDataset, "no discriminator outputs");
  double dev = 0.0;
  for (double d : disc_outputs) dev += std::abs(d - 0.5);
  dev /= static_cast<double>(disc_outputs.size());
  return dev < eps_d && average_jsd(learned, truth) < eps_jsd;
}

}  // namespace uavcgan::learner
