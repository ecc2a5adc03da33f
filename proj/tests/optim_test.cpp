#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "likeability/nn.hpp"
#include "likeability/optim.hpp"
#include "likeability/random.hpp"
#include "oracles.hpp"

namespace likeability::optim {
namespace {

testing::AdamReference reference(const AdamConfig& c) {
  return {c.learning_rate, c.beta1, c.beta2, c.epsilon, c.bias_correction};
}

/// Runs `steps` updates of one scalar under constant gradient; returns w after
/// each step.
std::vector<double> scalar_run(const AdamConfig& cfg, double w0, double g,
                               std::size_t steps) {
  const std::vector<std::size_t> sizes = {1};
  AdamState state = adam_init(sizes);
  std::vector<double> w = {w0};
  const std::vector<double> grad = {g};
  std::vector<double> out;
  for (std::size_t i = 0; i < steps; ++i) {
    const std::vector<std::span<double>> params = {w};
    const std::vector<std::span<const double>> grads = {grad};
    adam_step(cfg, state, params, grads);
    out.push_back(w[0]);
  }
  return out;
}

TEST(AdamInit, ZeroedBuffersMirrorShapes) {
  const auto net = nn::Network::initialize(
      13, {{4, nn::Activation::relu}, {1, nn::Activation::sigmoid}}, 1);
  const auto sizes = net.parameter_sizes();
  EXPECT_EQ(sizes, (std::vector<std::size_t>{52, 4, 4, 1}));
  const AdamState s = adam_init(sizes);
  EXPECT_EQ(s.step, 0u);
  ASSERT_EQ(s.m0.size(), 4u);
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    EXPECT_EQ(s.m0[t], std::vector<double>(sizes[t], 0.0));
    EXPECT_EQ(s.m1[t], std::vector<double>(sizes[t], 0.0));
  }
  const std::vector<std::size_t> square = {4};
  EXPECT_EQ(adam_init(square).m1.front().size(), 4u);
}

TEST(AdamStep, ZeroGradientLeavesParameters) {
  for (bool corrected : {false, true}) {
    AdamConfig cfg;
    cfg.bias_correction = corrected;
    const auto ws = scalar_run(cfg, 0.75, 0.0, 5);
    for (double w : ws) EXPECT_EQ(w, 0.75);
  }
}

TEST(AdamStep, OneStepHandValue) {
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  const std::vector<std::size_t> sizes = {1};
  AdamState state = adam_init(sizes);
  std::vector<double> w = {0.0};
  const std::vector<double> g = {1.0};
  const std::vector<std::span<double>> params = {w};
  const std::vector<std::span<const double>> grads = {g};
  adam_step(cfg, state, params, grads);
  EXPECT_NEAR(state.m0[0][0], 0.1, 1e-16);
  EXPECT_NEAR(state.m1[0][0], 0.001, 1e-18);
  EXPECT_EQ(state.step, 1u);
  // -0.1 * 0.1 / sqrt(0.001 + 1e-8), evaluated at 30 digits.
  EXPECT_NEAR(w[0], -0.316226184889866291, 1e-15);
}

TEST(AdamStep, TenStepTrajectoryMatchesReference) {
  for (bool corrected : {false, true}) {
    AdamConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.bias_correction = corrected;
    const auto ws = scalar_run(cfg, 0.0, 1.0, 10);
    const auto ref = testing::reference_adam_trajectory(0.0, 1.0, 10,
                                                        reference(cfg));
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(ws[i], ref[i], 1e-12);
  }
}

TEST(AdamStep, SecondMomentNeverNegative) {
  Rng rng(4);
  const std::vector<std::size_t> sizes = {6};
  AdamState state = adam_init(sizes);
  std::vector<double> w(6, 0.0);
  std::vector<double> g(6);
  for (int step = 0; step < 500; ++step) {
    for (double& v : g) v = rng.normal(0.0, step % 50 == 0 ? 100.0 : 1.0);
    const std::vector<std::span<double>> params = {w};
    const std::vector<std::span<const double>> grads = {g};
    adam_step(AdamConfig{}, state, params, grads);
    for (double m : state.m1[0]) ASSERT_GE(m, 0.0);
  }
}

TEST(AdamStep, UpdatesShrinkOnceGradientStops) {
  for (bool corrected : {false, true}) {
    AdamConfig cfg;
    cfg.bias_correction = corrected;
    const std::vector<std::size_t> sizes = {1};
    AdamState state = adam_init(sizes);
    std::vector<double> w = {0.0};
    std::vector<double> g = {0.8};
    auto step = [&] {
      const double before = w[0];
      const std::vector<std::span<double>> params = {w};
      const std::vector<std::span<const double>> grads = {g};
      adam_step(cfg, state, params, grads);
      return std::abs(w[0] - before);
    };
    for (int i = 0; i < 30; ++i) step();
    g[0] = 0.0;
    double last = step();
    for (int i = 0; i < 200; ++i) {
      const double delta = step();
      ASSERT_LT(delta, last);
      last = delta;
    }
  }
}

TEST(AdamStep, BiasCorrectedUpdateConvergesToPlainUpdate) {
  AdamConfig plain;
  AdamConfig corrected;
  corrected.bias_correction = true;
  const auto a = testing::reference_adam_updates(1.0, 20000, reference(plain));
  const auto b =
      testing::reference_adam_updates(1.0, 20000, reference(corrected));
  // Library trajectories reproduce the reference update sizes.
  const auto wa = scalar_run(plain, 0.0, 1.0, 10000);
  const auto wb = scalar_run(corrected, 0.0, 1.0, 10000);
  EXPECT_NEAR(wa[9999] - wa[9998], -a[9999], 1e-15);
  EXPECT_NEAR(wb[9999] - wb[9998], -b[9999], 1e-15);

  // Past the warm-up the gap is about lr * beta2^t / 2: it shrinks every
  // step and falls below 1e-9 once beta2^t is small enough.
  double previous = std::abs(a[99] - b[99]);
  for (std::size_t t = 100; t < a.size(); ++t) {
    const double gap = std::abs(a[t] - b[t]);
    ASSERT_LE(gap, previous + 1e-18) << t;
    previous = gap;
  }
  EXPECT_LT(std::abs(a[19999] - b[19999]), 1e-9);
  const double at_10k = std::abs(a[9999] - b[9999]);
  EXPECT_NEAR(at_10k, 1e-3 * std::pow(0.999, 10000) / 2.0, 1e-9);
}

TEST(AdamStep, ElementwiseIndependentUnderPermutation) {
  Rng rng(12);
  const std::size_t n = 17;
  std::vector<double> w(n), g(n);
  for (double& v : w) v = rng.normal();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);

  std::vector<double> wp(n);
  for (std::size_t i = 0; i < n; ++i) wp[i] = w[perm[i]];
  const std::vector<std::size_t> sizes = {n};
  AdamState s1 = adam_init(sizes);
  AdamState s2 = adam_init(sizes);
  for (int step = 0; step < 25; ++step) {
    for (double& v : g) v = rng.normal();
    std::vector<double> gp(n);
    for (std::size_t i = 0; i < n; ++i) gp[i] = g[perm[i]];
    const std::vector<std::span<double>> p1 = {w};
    const std::vector<std::span<const double>> g1 = {g};
    const std::vector<std::span<double>> p2 = {wp};
    const std::vector<std::span<const double>> g2 = {gp};
    adam_step(AdamConfig{}, s1, p1, g1);
    adam_step(AdamConfig{}, s2, p2, g2);
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(wp[i], w[perm[i]]);
}

TEST(AdamStep, Errors) {
  const std::vector<std::size_t> sizes = {2};
  AdamState state = adam_init(sizes);
  std::vector<double> w = {1.0, 2.0};
  std::vector<double> short_g = {1.0};
  std::vector<double> nan_g = {1.0, std::nan("")};
  const std::vector<std::span<double>> params = {w};

  auto kind_of = [&](const AdamConfig& cfg,
                     const std::vector<std::span<const double>>& grads) {
    try {
      adam_step(cfg, state, params, grads);
    } catch (const OptimError& e) {
      return e.kind();
    }
    ADD_FAILURE();
    return OptimErrorKind::BadConfig;
  };
  EXPECT_EQ(kind_of({}, {short_g}), OptimErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of({}, {}), OptimErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of({}, {nan_g}), OptimErrorKind::NonFiniteGradient);
  AdamConfig bad;
  bad.beta1 = 1.0;
  EXPECT_EQ(kind_of(bad, {w}), OptimErrorKind::BadConfig);
  // A rejected step leaves everything untouched.
  EXPECT_EQ(state.step, 0u);
  EXPECT_EQ(w, (std::vector<double>{1.0, 2.0}));
}

}  // namespace
}  // namespace likeability::optim
