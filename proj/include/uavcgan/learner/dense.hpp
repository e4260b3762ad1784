#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "uavcgan/core/error.hpp"
#include "uavcgan/core/random.hpp"

namespace uavcgan::learner {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fully connected network, leaky-ReLU hidden layers and a linear output. All weights live
/// in one flat vector (per layer: W row-major out x in, then b), so averaging, checkpoints and
/// finite differences operate on a single array. Batches are column-major: one sample per column.
class DenseNet {
 public:
  DenseNet() = default;

  explicit DenseNet(std::vector<int> layers, double leaky_slope = 0.2)
      : layers_(std::move(layers)), slope_(leaky_slope) {
    require(layers_.size() >= 2, ErrorKind::InvalidArgument, "network needs input and output layers");
    for (int n : layers_) require(n > 0, ErrorKind::InvalidArgument, "layer sizes must be positive");
    params_ = Vector::Zero(static_cast<Eigen::Index>(count_params(layers_)));
  }

  static std::size_t count_params(const std::vector<int>& layers) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l)
      n += static_cast<std::size_t>(layers[l + 1]) * static_cast<std::size_t>(layers[l] + 1);
    return n;
  }

  const std::vector<int>& layers() const { return layers_; }
  int input_size() const { return layers_.front(); }
  int output_size() const { return layers_.back(); }
  double leaky_slope() const { return slope_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  /// He-style initialisation scaled for leaky ReLU.
  void initialize(Rng& rng) {
    Eigen::Index off = 0;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      const int in = layers_[l], out = layers_[l + 1];
      const double scale = std::sqrt(2.0 / ((1.0 + slope_ * slope_) * in));
      for (int k = 0; k < out * in; ++k) params_[off++] = scale * standard_normal(rng);
      for (int k = 0; k < out; ++k) params_[off++] = 0.0;
    }
  }

  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    require(x.rows() == input_size(), ErrorKind::ShapeMismatch,
            "input has " + std::to_string(x.rows()) + " rows, network expects " + std::to_string(input_size()));
    if (cache) {
      cache->inputs.clear();
      cache->pre.clear();
    }
    Matrix a = x;
    Eigen::Index off = 0;
    const std::size_t num_layers = layers_.size() - 1;
    for (std::size_t l = 0; l < num_layers; ++l) {
      const int in = layers_[l], out = layers_[l + 1];
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(params_.data() + off,
                                                                                                 out, in);
      off += static_cast<Eigen::Index>(out) * in;
      Eigen::Map<const Vector> b(params_.data() + off, out);
      off += out;
      Matrix z = w * a;
      z.colwise() += b;
      if (cache) {
        cache->inputs.push_back(a);
        cache->pre.push_back(z);
      }
      if (l + 1 < num_layers) {
        a = z.unaryExpr([s = slope_](double v) { return v > 0.0 ? v : s * v; });
      } else {
        a = std::move(z);
      }
    }
    return a;
  }

  /// Back-propagates dL/d(output); accumulates dL/d(params) into `grad` and returns dL/d(input).
  Matrix backward(const Cache& cache, const Matrix& grad_output, Vector& grad) const {
    if (grad.size() != params_.size()) grad = Vector::Zero(params_.size());
    const std::size_t num_layers = layers_.size() - 1;
    std::vector<Eigen::Index> offsets(num_layers);
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < num_layers; ++l) {
      offsets[l] = off;
      off += static_cast<Eigen::Index>(layers_[l + 1]) * (layers_[l] + 1);
    }
    Matrix delta = grad_output;
    for (std::size_t l = num_layers; l-- > 0;) {
      const int in = layers_[l], out = layers_[l + 1];
      if (l + 1 < num_layers) {
        const Matrix& z = cache.pre[l];
        delta = delta.cwiseProduct(z.unaryExpr([s = slope_](double v) { return v > 0.0 ? 1.0 : s; }));
      }
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gw(grad.data() + offsets[l],
                                                                                             out, in);
      Eigen::Map<Vector> gb(grad.data() + offsets[l] + static_cast<Eigen::Index>(out) * in, out);
      gw.noalias() += delta * cache.inputs[l].transpose();
      gb.noalias() += delta.rowwise().sum();
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
          params_.data() + offsets[l], out, in);
      delta = w.transpose() * delta;
    }
    return delta;
  }

 private:
  std::vector<int> layers_;
  double slope_ = 0.2;
  Vector params_;
};

/// Plain SGD with momentum, or Adam.
struct Optimizer {
  enum class Kind { Sgd, Adam };
  Kind kind = Kind::Adam;
  double momentum = 0.0;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Vector m;
  Vector v;
  long steps = 0;

  /// Moves `params` along -grad (descent).
  void descend(Vector& params, const Vector& grad, double lr) {
    if (m.size() != params.size()) {
      m = Vector::Zero(params.size());
      v = Vector::Zero(params.size());
    }
    ++steps;
    if (kind == Kind::Sgd) {
      m = momentum * m + grad;
      params -= lr * m;
      return;
    }
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
    params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
  }
};

}  // namespace uavcgan::learner
