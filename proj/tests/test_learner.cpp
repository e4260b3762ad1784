#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "uavcgan/learner/checkpoint.hpp"
#include "uavcgan/learner/gan.hpp"
#include "uavcgan/learner/metrics.hpp"

using namespace uavcgan;
using namespace uavcgan::learner;
constexpr double kLn2 = std::numbers::ln2;

namespace {

template <typename F>
ErrorKind kind_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::IoError;
}

CondBatch random_batch(int directions, int n, Rng& rng, double shift = 0.0) {
  CondBatch b{Matrix(2, n), sample_conditions(directions, static_cast<std::size_t>(n), rng)};
  for (int k = 0; k < n; ++k) b.x.col(k) << standard_normal(rng) + shift, standard_normal(rng);
  return b;
}

double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-12});
}

template <typename F>
Vector central_difference(Vector& params, F objective, double h = 1e-6) {
  Vector g(params.size());
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double keep = params[k];
    params[k] = keep + h;
    const double up = objective();
    params[k] = keep - h;
    const double down = objective();
    params[k] = keep;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

double log_sig(double s) { return -std::log1p(std::exp(-s)); }

}  // namespace

TEST(Dense, ParameterCountAndDeterminism) {
  EXPECT_EQ(DenseNet::count_params({13, 32, 32, 2}), 13u * 32 + 32 + 32 * 32 + 32 + 32 * 2 + 2);
  DenseNet net({3, 5, 2});
  Rng a(1), b(1);
  net.initialize(a);
  DenseNet other({3, 5, 2});
  other.initialize(b);
  EXPECT_EQ(net.params(), other.params());
  const Matrix x = Matrix::Random(3, 7);
  EXPECT_EQ(net.forward(x), net.forward(x));
  EXPECT_EQ(kind_of([] { DenseNet({3}); }), ErrorKind::InvalidArgument);
}

TEST(Condition, OneHot) {
  const Matrix m = one_hot({1, 3, 2}, 3);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(m.col(c).sum(), 1.0);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(2, 1), 1.0);
  EXPECT_EQ(m(1, 2), 1.0);
}

TEST(MixWeights, Examples) {
  auto w = mix_weights(10000, {{1, 10000}}, 0.5);
  EXPECT_NEAR(w.self_weight, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.neighbor_weights.at(1), 1.0 / 3.0, 1e-15);

  w = mix_weights(10000, {}, 0.5);
  EXPECT_EQ(w.self_weight, 1.0);
  EXPECT_TRUE(w.neighbor_weights.empty());

  w = mix_weights(10000, {{3, 10000}, {4, 10000}}, 0.5);
  EXPECT_NEAR(w.self_weight, 0.5, 1e-15);
  EXPECT_NEAR(w.neighbor_weights.at(3), 0.25, 1e-15);
  EXPECT_NEAR(w.neighbor_weights.at(4), 0.25, 1e-15);

  EXPECT_EQ(kind_of([] { mix_weights(0, {{1, 5}}, 0.5); }), ErrorKind::EmptyDataset);
}

TEST(MixWeights, SumToOneAndPermutationEquivariant) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::map<int, long> sizes, swapped;
    const int n = 1 + t % 5;
    for (int j = 0; j < n; ++j) sizes[j] = 1 + static_cast<long>(uniform01(rng) * 5000);
    for (int j = 0; j < n; ++j) swapped[n - 1 - j] = sizes[j];
    const double eta = 0.05 + 0.95 * uniform01(rng);
    const auto w = mix_weights(1 + static_cast<long>(uniform01(rng) * 5000), sizes, eta);
    double total = w.self_weight;
    for (const auto& [j, v] : w.neighbor_weights) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const auto ws = mix_weights(1 + static_cast<long>(0), swapped, eta);
    const auto wp = mix_weights(1 + static_cast<long>(0), sizes, eta);
    EXPECT_DOUBLE_EQ(ws.self_weight, wp.self_weight);
    for (int j = 0; j < n; ++j) EXPECT_DOUBLE_EQ(ws.neighbor_weights.at(n - 1 - j), wp.neighbor_weights.at(j));
  }
}

TEST(Value, IndifferentDiscriminatorGivesMinusTwoLn2) {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    Discriminator d(4, {8, 8});
    d.net.params().setZero();  // logits 0 everywhere
    Generator gen(3, 4, {8});
    gen.net.initialize(rng);
    const auto real = random_batch(4, 10 + t, rng);
    const auto conds = sample_conditions(4, 7, rng);
    EXPECT_NEAR(value_function(d, gen, real, sample_noise(3, 7, rng), conds), -2 * kLn2, 1e-12);
  }
}

TEST(Value, PerfectDiscriminatorReachesSupremum) {
  Discriminator d(2, {});
  d.net.params().setZero();
  d.net.params()[0] = 1e4;  // weight on Re
  Generator gen(1, 2, {});
  gen.net.params().setZero();
  gen.net.params()[6] = -1.0;  // bias of the Re output
  CondBatch real{Matrix::Ones(2, 4), {1, 2, 1, 2}};
  Rng rng(1);
  const double v = value_function(d, gen, real, sample_noise(1, 4, rng), {1, 2, 2, 1});
  EXPECT_NEAR(v, 2 * std::log(1 - kLogClamp), 1e-6);
  EXPECT_LE(v, 0.0);
}

TEST(Value, MixtureMatchesHandMixedBatch) {
  Rng rng(8);
  Discriminator d(1, {6});
  d.net.initialize(rng);
  Generator gen(2, 1, {6});
  gen.net.initialize(rng);
  const auto local = random_batch(1, 2, rng), s1 = random_batch(1, 2, rng, 1.0), s2 = random_batch(1, 2, rng, -1.0);
  const auto w = mix_weights(100, {{1, 100}, {2, 100}}, 0.5);  // 1/2, 1/4, 1/4
  const Matrix z = sample_noise(2, 5, rng);
  const std::vector<int> conds(5, 1);
  const double v = value_function_mixture(d, gen, local, {{1, s1}, {2, s2}}, w, z, conds);

  // Mixture with weights 4/8, 2/8, 2/8 realised by repetition.
  CondBatch mixed = local;
  mixed.append(local);
  mixed.append(s1);
  mixed.append(s2);
  EXPECT_NEAR(v, value_function(d, gen, mixed, z, conds), 1e-12);

  double by_hand = 0.0;
  const Vector sl = d.logits(local), a = d.logits(s1), b = d.logits(s2);
  by_hand += 0.5 * (log_sig(sl[0]) + log_sig(sl[1])) / 2 + 0.25 * (log_sig(a[0]) + log_sig(a[1])) / 2 +
             0.25 * (log_sig(b[0]) + log_sig(b[1])) / 2;
  const Vector f = d.logits(gen.generate(z, conds));
  for (int k = 0; k < 5; ++k) by_hand += log_sig(-f[k]) / 5;
  EXPECT_NEAR(v, by_hand, 1e-12);
}

TEST(Gradient, DiscriminatorMatchesFiniteDifferences) {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    Discriminator d(3, {8});
    d.net.initialize(rng);
    const auto real = random_batch(3, 12, rng), shared = random_batch(3, 5, rng, 0.5), fake = random_batch(3, 9, rng, -0.5);
    const Vector analytic = disc_gradient(d, real, shared, fake);
    const Vector numeric =
        central_difference(d.net.params(), [&] { return disc_objective(d, real, shared, fake); });
    EXPECT_LT(relative_error(analytic, numeric), 1e-4) << t;
  }
}

TEST(Gradient, GeneratorMatchesFiniteDifferences) {
  Rng rng(12);
  for (GenLoss loss : {GenLoss::NonSaturating, GenLoss::Literal}) {
    for (int t = 0; t < 10; ++t) {
      Discriminator d(3, {8});
      d.net.initialize(rng);
      Generator gen(2, 3, {8});
      gen.net.initialize(rng);
      const Matrix z = sample_noise(2, 11, rng);
      const auto conds = sample_conditions(3, 11, rng);
      const Vector analytic = gen_gradient(gen, d, z, conds, loss);
      const Vector numeric =
          central_difference(gen.net.params(), [&] { return gen_objective(gen, d, z, conds, loss); });
      EXPECT_LT(relative_error(analytic, numeric), 1e-4) << t;
    }
  }
}

TEST(Gradient, DefaultArchitectureToo) {
  Rng rng(13);
  LearnerConfig cfg;
  auto s = LearnerState::create(cfg, rng);
  const auto real = random_batch(9, 20, rng), fake = random_batch(9, 20, rng, 1.0);
  const Vector gd = disc_gradient(s.disc, real, {}, fake);
  EXPECT_LT(relative_error(gd, central_difference(s.disc.net.params(),
                                                  [&] { return disc_objective(s.disc, real, {}, fake); })),
            1e-4);
  const Matrix z = sample_noise(4, 20, rng);
  const auto conds = sample_conditions(9, 20, rng);
  const Vector gg = gen_gradient(s.gen, s.disc, z, conds);
  EXPECT_LT(relative_error(gg, central_difference(s.gen.net.params(),
                                                  [&] { return gen_objective(s.gen, s.disc, z, conds); })),
            1e-4);
}

TEST(TrainStep, ZeroLearningRateLeavesParameters) {
  Rng rng(14);
  for (auto kind : {Optimizer::Kind::Adam, Optimizer::Kind::Sgd}) {
    LearnerConfig cfg;
    cfg.directions = 3;
    cfg.optimizer = kind;
    auto s = LearnerState::create(cfg, rng);
    const Vector d0 = s.disc.net.params(), g0 = s.gen.net.params();
    const auto real = random_batch(3, 16, rng), fake = random_batch(3, 16, rng);
    train_step_disc(s, real, {}, fake, 0.0);
    train_step_gen(s, sample_noise(4, 16, rng), sample_conditions(3, 16, rng), 0.0);
    EXPECT_EQ(s.disc.net.params(), d0);
    EXPECT_EQ(s.gen.net.params(), g0);
  }
}

TEST(TrainStep, DiscriminatorAscendsOnSeparableBatch) {
  Rng rng(15);
  LearnerConfig cfg;
  cfg.directions = 2;
  cfg.optimizer = Optimizer::Kind::Sgd;
  cfg.momentum = 0.0;
  for (int t = 0; t < 10; ++t) {
    auto s = LearnerState::create(cfg, rng);
    const auto real = random_batch(2, 32, rng, 3.0), fake = random_batch(2, 32, rng, -3.0);
    const double before = disc_objective(s.disc, real, {}, fake);
    train_step_disc(s, real, {}, fake, 0.01);
    EXPECT_GT(disc_objective(s.disc, real, {}, fake), before);
  }
}

TEST(TrainStep, GeneratorMovesTowardHigherScore) {
  Rng rng(16);
  LearnerConfig cfg;
  cfg.directions = 2;
  cfg.hidden = {16};
  cfg.optimizer = Optimizer::Kind::Sgd;
  cfg.momentum = 0.0;
  for (GenLoss loss : {GenLoss::NonSaturating, GenLoss::Literal}) {
    cfg.gen_loss = loss;
    auto s = LearnerState::create(cfg, rng);
    // Frozen discriminator that rejects anything with negative real part.
    s.disc = Discriminator(2, {});
    s.disc.net.params().setZero();
    s.disc.net.params()[0] = 2.0;
    const Matrix z = sample_noise(4, 64, rng);
    const auto conds = sample_conditions(2, 64, rng);
    const double before = s.disc.scores(s.gen.generate(z, conds)).mean();
    const Vector d0 = s.disc.net.params();
    train_step_gen(s, z, conds, 0.05);
    EXPECT_GT(s.disc.scores(s.gen.generate(z, conds)).mean(), before);
    EXPECT_EQ(s.disc.net.params(), d0);
  }
}

TEST(TrainStep, NonFiniteGradientDiverges) {
  Rng rng(17);
  LearnerConfig cfg;
  cfg.directions = 2;
  auto s = LearnerState::create(cfg, rng);
  auto real = random_batch(2, 4, rng);
  real.x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { train_step_disc(s, real, {}, random_batch(2, 4, rng), 0.1); }),
            ErrorKind::NumericalDivergence);
}

TEST(TrainStep, SeededTrajectoriesAreBitIdentical) {
  auto run = [] {
    Rng rng(21);
    LearnerConfig cfg;
    cfg.directions = 3;
    auto s = LearnerState::create(cfg, rng);
    for (int k = 0; k < 20; ++k) {
      train_step_disc(s, random_batch(3, 16, rng, 1.0), {}, s.gen.generate(sample_noise(4, 16, rng), sample_conditions(3, 16, rng)), 1e-3);
      train_step_gen(s, sample_noise(4, 16, rng), sample_conditions(3, 16, rng), 1e-3);
    }
    return std::make_pair(s.disc.net.params(), s.gen.net.params());
  };
  EXPECT_EQ(run(), run());
}

TEST(Discriminator, OutputsStrictlyInsideUnitInterval) {
  Rng rng(18);
  Discriminator d(3, {8, 8});
  d.net.initialize(rng);
  for (double scale : {1.0, 1e3, 1e6, 1e9}) {
    auto b = random_batch(3, 50, rng);
    b.x *= scale;
    for (double v : d.scores(b)) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Jsd, HandValues) {
  const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0}, a{1.0, 0.0, 0.0}, b{0.0, 0.5, 0.5};
  EXPECT_EQ(jsd(std::span<const double>(p), std::span<const double>(p)), 0.0);
  EXPECT_NEAR(jsd(std::span<const double>(a), std::span<const double>(b)), kLn2, 1e-15);
  const double expected = 0.5 * (0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25)) + 0.5 * std::log(1 / 0.75);
  EXPECT_NEAR(jsd(std::span<const double>(p), std::span<const double>(q)), expected, 1e-15);
  EXPECT_NEAR(expected, 0.2157, 1e-4);
}

TEST(Jsd, SymmetricBoundedAndZeroOnlyWhenEqual) {
  Rng rng(19);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(8), q(8);
    double sp = 0, sq = 0;
    for (int k = 0; k < 8; ++k) {
      p[k] = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
      q[k] = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
      sp += p[k];
      sq += q[k];
    }
    if (sp == 0 || sq == 0) continue;
    for (int k = 0; k < 8; ++k) {
      p[k] /= sp;
      q[k] /= sq;
    }
    const double a = jsd(std::span<const double>(p), std::span<const double>(q));
    EXPECT_DOUBLE_EQ(a, jsd(std::span<const double>(q), std::span<const double>(p)));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, kLn2);
    EXPECT_GT(a, 0.0);  // continuous draws never coincide
  }
}

TEST(Jsd, BinningMismatch) {
  Histogram2D a(32, -4, 4), b(16, -4, 4), c(32, -3, 3);
  a.add(0, 0);
  b.add(0, 0);
  c.add(0, 0);
  EXPECT_EQ(kind_of([&] { jsd(a, b); }), ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of([&] { jsd(a, c); }), ErrorKind::ShapeMismatch);
}

TEST(Histogram, OutOfRangeLandsOnBorder) {
  Histogram2D h;
  h.add(100.0, -100.0);
  h.add(0.0, 0.0);
  h.add(-4.0, 3.99);
  EXPECT_EQ(h.mass[31 * 32 + 0], 1.0);
  EXPECT_EQ(h.mass[16 * 32 + 16], 1.0);
  EXPECT_EQ(h.mass[0 * 32 + 31], 1.0);
  EXPECT_EQ(h.total(), 3.0);
  EXPECT_NEAR(h.normalized().total(), 1.0, 1e-15);
}

TEST(Histogram, ConditionHistogramsUseReferenceScale) {
  const std::vector<std::complex<double>> g{{1, 1}, {3, 1}, {10, 0}};
  const std::vector<int> dirs{1, 1, 2};
  Scaler ref = Scaler::identity(2);
  ref.mean_re = {2, 10};
  const auto h = condition_histograms(g, dirs, ref);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_NEAR(h[0].total(), 1.0, 1e-15);
  EXPECT_EQ(h[1].mass[static_cast<std::size_t>(h[1].index(0.0) * 32 + h[1].index(0.0))], 1.0);
}

TEST(NashCheck, Examples) {
  Histogram2D truth;
  truth.add(0.5, -0.5);
  truth.add(1.5, 0.5);
  truth = truth.normalized();
  const std::vector<double> half(10, 0.5), high(10, 0.9);
  EXPECT_TRUE(ne_check(std::span<const double>(half), truth, truth, 0.05, 0.05));
  EXPECT_FALSE(ne_check(std::span<const double>(high), truth, truth, 0.05, 0.05));
  Histogram2D other;
  other.add(-3, -3);
  EXPECT_FALSE(ne_check(std::span<const double>(half), other.normalized(), truth, 0.05, 0.05));
  EXPECT_EQ(kind_of([&] { ne_check(std::span<const double>(), truth, truth, 0.05, 0.05); }), ErrorKind::EmptyDataset);
}

TEST(Scaler, FitStandardizesPerDirection) {
  Rng rng(20);
  std::vector<std::complex<double>> g;
  std::vector<int> dirs;
  for (int k = 0; k < 4000; ++k) {
    const int d = 1 + k % 2;
    g.emplace_back(d * 5.0 + d * standard_normal(rng), -d + 0.1 * standard_normal(rng));
    dirs.push_back(d);
  }
  const auto sc = Scaler::fit(g, dirs, 2);
  const auto b = sc.to_batch(g, dirs);
  for (int d = 1; d <= 2; ++d) {
    double m = 0, v = 0, n = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (dirs[k] == d) {
        m += b.x(0, static_cast<Eigen::Index>(k));
        v += b.x(0, static_cast<Eigen::Index>(k)) * b.x(0, static_cast<Eigen::Index>(k));
        n += 1;
      }
    EXPECT_NEAR(m / n, 0.0, 1e-12);
    EXPECT_NEAR(v / n, 1.0, 1e-12);
  }
  const auto back = sc.to_gains(b);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(std::abs(back[k] - g[k]), 0.0, 1e-12);
  EXPECT_EQ(kind_of([&] { Scaler::fit(g, dirs, 3); }), ErrorKind::EmptyDataset);
}

TEST(Checkpoint, RoundTrip) {
  Rng rng(22);
  LearnerConfig cfg;
  cfg.directions = 5;
  auto s = LearnerState::create(cfg, rng);
  s.scaler.mean_re[2] = 1.25e-7;
  s.scaler.std_im[4] = 3.0 / 7.0;
  const auto text = checkpoint_to_text(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCheckpointMagic);
  const auto back = checkpoint_from_text(text);
  EXPECT_EQ(back.gen.net.params(), s.gen.net.params());
  EXPECT_EQ(back.disc.net.params(), s.disc.net.params());
  EXPECT_EQ(back.gen.net.layers(), s.gen.net.layers());
  EXPECT_EQ(back.scaler.mean_re, s.scaler.mean_re);
  EXPECT_EQ(back.scaler.std_im, s.scaler.std_im);
  EXPECT_EQ(checkpoint_to_text(back), text);
  EXPECT_THROW(checkpoint_from_text("not a checkpoint\n"), Error);
}
