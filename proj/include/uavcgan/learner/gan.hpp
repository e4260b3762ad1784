#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <vector>

#include "uavcgan/learner/dense.hpp"

namespace uavcgan::learner {

inline constexpr double kLogClamp = 1e-7;

/// Conditioned samples in standardized (Re, Im) units: column n of `x` carries condition dirs[n] (1-based).
struct CondBatch {
  Matrix x = Matrix(2, 0);
  std::vector<int> dirs;

  std::size_t size() const { return dirs.size(); }

  void append(const CondBatch& other) {
    const auto n = x.cols();
    x.conservativeResize(2, n + other.x.cols());
    x.rightCols(other.x.cols()) = other.x;
    dirs.insert(dirs.end(), other.dirs.begin(), other.dirs.end());
  }
};

inline Matrix one_hot(const std::vector<int>& dirs, int directions) {
  Matrix m = Matrix::Zero(directions, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t n = 0; n < dirs.size(); ++n) {
    require(dirs[n] >= 1 && dirs[n] <= directions, ErrorKind::InvalidArgument,
            "condition " + std::to_string(dirs[n]) + " outside [1, " + std::to_string(directions) + "]");
    m(dirs[n] - 1, static_cast<Eigen::Index>(n)) = 1.0;
  }
  return m;
}

/// Per-direction affine map between physical gains and the unit-scale space the nets work in.
struct Scaler {
  std::vector<double> mean_re, mean_im, std_re, std_im;

  int directions() const { return static_cast<int>(mean_re.size()); }

  static Scaler identity(int directions) {
    const auto n = static_cast<std::size_t>(directions);
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 1.0),
            std::vector<double>(n, 1.0)};
  }

  static Scaler fit(const std::vector<std::complex<double>>& gains, const std::vector<int>& dirs, int directions) {
    require(gains.size() == dirs.size(), ErrorKind::ShapeMismatch, "gains and conditions differ in length");
    const auto n = static_cast<std::size_t>(directions);
    std::vector<double> s_re(n, 0.0), s_im(n, 0.0), q_re(n, 0.0), q_im(n, 0.0), count(n, 0.0);
    for (std::size_t k = 0; k < gains.size(); ++k) {
      require(dirs[k] >= 1 && dirs[k] <= directions, ErrorKind::InvalidArgument, "condition out of range");
      const auto d = static_cast<std::size_t>(dirs[k] - 1);
      s_re[d] += gains[k].real();
      s_im[d] += gains[k].imag();
      count[d] += 1.0;
    }
    Scaler sc = identity(directions);
    for (std::size_t d = 0; d < n; ++d) {
      require(count[d] > 0.0, ErrorKind::EmptyDataset, "no samples for direction " + std::to_string(d + 1));
      sc.mean_re[d] = s_re[d] / count[d];
      sc.mean_im[d] = s_im[d] / count[d];
    }
    for (std::size_t k = 0; k < gains.size(); ++k) {
      const auto d = static_cast<std::size_t>(dirs[k] - 1);
      q_re[d] += std::pow(gains[k].real() - sc.mean_re[d], 2);
      q_im[d] += std::pow(gains[k].imag() - sc.mean_im[d], 2);
    }
    for (std::size_t d = 0; d < n; ++d) {
      const double sr = std::sqrt(q_re[d] / count[d]), si = std::sqrt(q_im[d] / count[d]);
      // A constant component keeps unit scale rather than dividing by zero.
      sc.std_re[d] = sr > 0.0 ? sr : 1.0;
      sc.std_im[d] = si > 0.0 ? si : 1.0;
    }
    return sc;
  }

  Eigen::Vector2d standardize(std::complex<double> g, int dir) const {
    const auto d = static_cast<std::size_t>(dir - 1);
    return {(g.real() - mean_re[d]) / std_re[d], (g.imag() - mean_im[d]) / std_im[d]};
  }

  std::complex<double> destandardize(double re, double im, int dir) const {
    const auto d = static_cast<std::size_t>(dir - 1);
    return {re * std_re[d] + mean_re[d], im * std_im[d] + mean_im[d]};
  }

  CondBatch to_batch(const std::vector<std::complex<double>>& gains, const std::vector<int>& dirs) const {
    require(gains.size() == dirs.size(), ErrorKind::ShapeMismatch, "gains and conditions differ in length");
    CondBatch b{Matrix(2, static_cast<Eigen::Index>(gains.size())), dirs};
    for (std::size_t k = 0; k < gains.size(); ++k) b.x.col(static_cast<Eigen::Index>(k)) = standardize(gains[k], dirs[k]);
    return b;
  }

  std::vector<std::complex<double>> to_gains(const CondBatch& b) const {
    std::vector<std::complex<double>> out(b.size());
    for (std::size_t k = 0; k < b.size(); ++k)
      out[k] = destandardize(b.x(0, static_cast<Eigen::Index>(k)), b.x(1, static_cast<Eigen::Index>(k)), b.dirs[k]);
    return out;
  }
};

struct Generator {
  DenseNet net;
  int noise_dim = 0;
  int directions = 0;

  Generator() = default;
  Generator(int noise, int dirs, const std::vector<int>& hidden, double slope = 0.2)
      : noise_dim(noise), directions(dirs) {
    require(noise > 0 && dirs > 0, ErrorKind::InvalidArgument, "generator needs noise_dim > 0 and I > 0");
    std::vector<int> layers{noise + dirs};
    layers.insert(layers.end(), hidden.begin(), hidden.end());
    layers.push_back(2);
    net = DenseNet(layers, slope);
  }

  Matrix input(const Matrix& noise, const std::vector<int>& dirs) const {
    require(noise.rows() == noise_dim && noise.cols() == static_cast<Eigen::Index>(dirs.size()),
            ErrorKind::ShapeMismatch, "noise batch does not match generator or conditions");
    Matrix in(noise_dim + directions, noise.cols());
    in.topRows(noise_dim) = noise;
    in.bottomRows(directions) = one_hot(dirs, directions);
    return in;
  }

  CondBatch generate(const Matrix& noise, const std::vector<int>& dirs) const {
    return {net.forward(input(noise, dirs)), dirs};
  }
};

struct Discriminator {
  DenseNet net;
  int directions = 0;

  Discriminator() = default;
  Discriminator(int dirs, const std::vector<int>& hidden, double slope = 0.2) : directions(dirs) {
    require(dirs > 0, ErrorKind::InvalidArgument, "discriminator needs I > 0");
    std::vector<int> layers{2 + dirs};
    layers.insert(layers.end(), hidden.begin(), hidden.end());
    layers.push_back(1);
    net = DenseNet(layers, slope);
  }

  Matrix input(const CondBatch& b) const {
    Matrix in(2 + directions, b.x.cols());
    in.topRows(2) = b.x;
    in.bottomRows(directions) = one_hot(b.dirs, directions);
    return in;
  }

  Vector logits(const CondBatch& b, DenseNet::Cache* cache = nullptr) const {
    return net.forward(input(b), cache).row(0).transpose();
  }

  /// D values, kept inside [eps, 1 - eps] like the log terms so they never touch 0 or 1.
  Vector scores(const CondBatch& b) const {
    return logits(b).unaryExpr([](double s) {
      return std::clamp(1.0 / (1.0 + std::exp(-s)), kLogClamp, 1.0 - kLogClamp);
    });
  }
};

namespace detail {

inline double sigmoid(double s) { return s >= 0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s)); }

/// log sigma(s), floored at log(eps); second member is d/ds (zero once clamped).
inline std::pair<double, double> log_sigmoid(double s, double eps) {
  const double v = s >= 0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s));
  if (v < std::log(eps)) return {std::log(eps), 0.0};
  return {v, 1.0 - sigmoid(s)};
}

/// log(1 - sigma(s)) = log sigma(-s).
inline std::pair<double, double> log_one_minus_sigmoid(double s, double eps) {
  auto [v, d] = log_sigmoid(-s, eps);
  return {v, -d};
}

inline void check_finite(const Vector& g, const char* what) {
  require(g.allFinite(), ErrorKind::NumericalDivergence, std::string("non-finite ") + what + " gradient");
}

}  // namespace detail

/// Discriminator objective: mean log D over local and shared samples (both count as real) plus mean
/// log(1 - D) over generated samples. Ascent direction.
inline double disc_objective(const Discriminator& d, const CondBatch& real, const CondBatch& shared,
                             const CondBatch& fake, double eps = kLogClamp) {
  CondBatch all_real = real;
  all_real.append(shared);
  require(all_real.size() > 0 && fake.size() > 0, ErrorKind::EmptyDataset, "empty discriminator batch");
  double r = 0.0, f = 0.0;
  for (double s : d.logits(all_real)) r += detail::log_sigmoid(s, eps).first;
  for (double s : d.logits(fake)) f += detail::log_one_minus_sigmoid(s, eps).first;
  return r / static_cast<double>(all_real.size()) + f / static_cast<double>(fake.size());
}

inline Vector disc_gradient(const Discriminator& d, const CondBatch& real, const CondBatch& shared,
                            const CondBatch& fake, double eps = kLogClamp) {
  CondBatch all_real = real;
  all_real.append(shared);
  require(all_real.size() > 0 && fake.size() > 0, ErrorKind::EmptyDataset, "empty discriminator batch");
  Vector grad = Vector::Zero(d.net.params().size());
  DenseNet::Cache cache;
  const Vector sr = d.logits(all_real, &cache);
  Matrix g(1, sr.size());
  for (Eigen::Index k = 0; k < sr.size(); ++k)
    g(0, k) = detail::log_sigmoid(sr[k], eps).second / static_cast<double>(all_real.size());
  d.net.backward(cache, g, grad);
  const Vector sf = d.logits(fake, &cache);
  g.resize(1, sf.size());
  for (Eigen::Index k = 0; k < sf.size(); ++k)
    g(0, k) = detail::log_one_minus_sigmoid(sf[k], eps).second / static_cast<double>(fake.size());
  d.net.backward(cache, g, grad);
  return grad;
}

enum class GenLoss { NonSaturating, Literal };

/// Generator loss to minimise: -mean log D(G) (non-saturating) or mean log(1 - D(G)) (literal).
inline double gen_objective(const Generator& gen, const Discriminator& d, const Matrix& noise,
                            const std::vector<int>& dirs, GenLoss loss = GenLoss::NonSaturating,
                            double eps = kLogClamp) {
  const CondBatch fake = gen.generate(noise, dirs);
  double acc = 0.0;
  for (double s : d.logits(fake))
    acc += loss == GenLoss::Literal ? detail::log_one_minus_sigmoid(s, eps).first : -detail::log_sigmoid(s, eps).first;
  return acc / static_cast<double>(fake.size());
}

inline Vector gen_gradient(const Generator& gen, const Discriminator& d, const Matrix& noise,
                           const std::vector<int>& dirs, GenLoss loss = GenLoss::NonSaturating,
                           double eps = kLogClamp) {
  require(!dirs.empty(), ErrorKind::EmptyDataset, "empty generator batch");
  DenseNet::Cache gcache, dcache;
  const Matrix out = gen.net.forward(gen.input(noise, dirs), &gcache);
  const CondBatch fake{out, dirs};
  const Vector s = d.logits(fake, &dcache);
  Matrix g(1, s.size());
  const double n = static_cast<double>(dirs.size());
  for (Eigen::Index k = 0; k < s.size(); ++k)
    g(0, k) = (loss == GenLoss::Literal ? detail::log_one_minus_sigmoid(s[k], eps).second
                                        : -detail::log_sigmoid(s[k], eps).second) /
              n;
  Vector unused;
  const Matrix dx = d.net.backward(dcache, g, unused);
  Vector grad = Vector::Zero(gen.net.params().size());
  gen.net.backward(gcache, dx.topRows(2), grad);
  return grad;
}

/// Mixing weights of the discriminator's "real" distribution.
struct MixWeights {
  double self_weight = 1.0;
  std::map<int, double> neighbor_weights;
};

/// pi_g = H_g / (H_g + eta sum H_j), pi_gj = eta H_g / (...), normalised to sum to one.
inline MixWeights mix_weights(long own_size, const std::map<int, long>& neighbor_sizes, double eta) {
  require(own_size > 0, ErrorKind::EmptyDataset, "local dataset is empty");
  require(eta > 0.0, ErrorKind::InvalidArgument, "eta must be positive");
  double denom = static_cast<double>(own_size);
  for (const auto& [j, h] : neighbor_sizes) {
    require(h >= 0, ErrorKind::InvalidArgument, "negative neighbour dataset size");
    denom += eta * static_cast<double>(h);
  }
  MixWeights w;
  w.self_weight = static_cast<double>(own_size) / denom;
  double total = w.self_weight;
  for (const auto& [j, h] : neighbor_sizes) {
    (void)h;
    const double v = eta * static_cast<double>(own_size) / denom;
    w.neighbor_weights[j] = v;
    total += v;
  }
  w.self_weight /= total;
  for (auto& [j, v] : w.neighbor_weights) v /= total;
  return w;
}

namespace detail {

/// (1/|conditions|) sum over conditions of the per-condition mean of f(logit).
template <typename F>
double per_condition_mean(const Vector& logits, const std::vector<int>& dirs, F f) {
  std::map<int, std::pair<double, double>> acc;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    auto& [sum, n] = acc[dirs[k]];
    sum += f(logits[static_cast<Eigen::Index>(k)]);
    n += 1.0;
  }
  double total = 0.0;
  for (const auto& [dir, p] : acc) total += p.first / p.second;
  return total / static_cast<double>(acc.size());
}

}  // namespace detail

/// Condition-averaged adversarial value: E log D(h|phi) + E log(1 - D(G(z|phi))).
inline double value_function(const Discriminator& d, const Generator& gen, const CondBatch& real,
                             const Matrix& noise, const std::vector<int>& conditions, double eps = kLogClamp) {
  require(real.size() > 0 && !conditions.empty(), ErrorKind::EmptyDataset, "value function needs nonempty batches");
  const CondBatch fake = gen.generate(noise, conditions);
  const double r = detail::per_condition_mean(d.logits(real), real.dirs,
                                              [eps](double s) { return detail::log_sigmoid(s, eps).first; });
  const double f = detail::per_condition_mean(d.logits(fake), fake.dirs,
                                              [eps](double s) { return detail::log_one_minus_sigmoid(s, eps).first; });
  return r + f;
}

/// Same value with the real expectation taken under the mixture pi_g * local + sum_j pi_gj * shared_j.
inline double value_function_mixture(const Discriminator& d, const Generator& gen, const CondBatch& local,
                                     const std::map<int, CondBatch>& shared, const MixWeights& w,
                                     const Matrix& noise, const std::vector<int>& conditions,
                                     double eps = kLogClamp) {
  require(local.size() > 0 && !conditions.empty(), ErrorKind::EmptyDataset, "value function needs nonempty batches");
  auto real_term = [&](const CondBatch& b) {
    return detail::per_condition_mean(d.logits(b), b.dirs,
                                      [eps](double s) { return detail::log_sigmoid(s, eps).first; });
  };
  double r = w.self_weight * real_term(local);
  for (const auto& [j, b] : shared) {
    const auto it = w.neighbor_weights.find(j);
    require(it != w.neighbor_weights.end(), ErrorKind::InvalidArgument,
            "no mixing weight for neighbour " + std::to_string(j));
    if (b.size() > 0) r += it->second * real_term(b);
  }
  const CondBatch fake = gen.generate(noise, conditions);
  const double f = detail::per_condition_mean(d.logits(fake), fake.dirs,
                                              [eps](double s) { return detail::log_one_minus_sigmoid(s, eps).first; });
  return r + f;
}

struct LearnerConfig {
  int directions = 9;
  int noise_dim = 4;
  std::vector<int> hidden{32, 32};
  double leaky_slope = 0.2;
  double lr_disc = 1e-3;
  double lr_gen = 1e-3;
  Optimizer::Kind optimizer = Optimizer::Kind::Adam;
  double momentum = 0.5;
  double beta1 = 0.5;
  double beta2 = 0.999;
  GenLoss gen_loss = GenLoss::NonSaturating;
};

/// One node's generator/discriminator pair with optimiser state and standardisation statistics.
struct LearnerState {
  Generator gen;
  Discriminator disc;
  Optimizer gen_opt;
  Optimizer disc_opt;
  Scaler scaler;
  GenLoss gen_loss = GenLoss::NonSaturating;

  static LearnerState create(const LearnerConfig& cfg, Rng& rng) {
    LearnerState s;
    s.gen = Generator(cfg.noise_dim, cfg.directions, cfg.hidden, cfg.leaky_slope);
    s.disc = Discriminator(cfg.directions, cfg.hidden, cfg.leaky_slope);
    s.gen.net.initialize(rng);
    s.disc.net.initialize(rng);
    for (Optimizer* o : {&s.gen_opt, &s.disc_opt}) {
      o->kind = cfg.optimizer;
      o->momentum = cfg.momentum;
      o->beta1 = cfg.beta1;
      o->beta2 = cfg.beta2;
    }
    s.scaler = Scaler::identity(cfg.directions);
    s.gen_loss = cfg.gen_loss;
    return s;
  }
};

/// One ascent step on the discriminator objective; returns the new parameters.
inline const Vector& train_step_disc(LearnerState& s, const CondBatch& real, const CondBatch& shared,
                                     const CondBatch& fake, double learning_rate) {
  const Vector g = disc_gradient(s.disc, real, shared, fake);
  detail::check_finite(g, "discriminator");
  s.disc_opt.descend(s.disc.net.params(), -g, learning_rate);
  return s.disc.net.params();
}

/// One descent step on the generator loss; returns the new parameters.
inline const Vector& train_step_gen(LearnerState& s, const Matrix& noise, const std::vector<int>& conditions,
                                    double learning_rate) {
  const Vector g = gen_gradient(s.gen, s.disc, noise, conditions, s.gen_loss);
  detail::check_finite(g, "generator");
  s.gen_opt.descend(s.gen.net.params(), g, learning_rate);
  return s.gen.net.params();
}

inline Matrix sample_noise(int noise_dim, std::size_t n, Rng& rng) {
  Matrix z(noise_dim, static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = standard_normal(rng);
  return z;
}

inline std::vector<int> sample_conditions(int directions, std::size_t n, Rng& rng) {
  std::uniform_int_distribution<int> pick(1, directions);
  std::vector<int> dirs(n);
  for (auto& d : dirs) d = pick(rng);
  return dirs;
}

/// Draws n generated gains in physical units.
inline std::vector<std::complex<double>> generate_gains(const LearnerState& s, const std::vector<int>& dirs, Rng& rng) {
  const Matrix z = sample_noise(s.gen.noise_dim, dirs.size(), rng);
  return s.scaler.to_gains(s.gen.generate(z, dirs));
}

}  // namespace uavcgan::learner
