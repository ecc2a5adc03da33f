#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "likeability/nn.hpp"
#include "likeability/random.hpp"
#include "oracles.hpp"

namespace likeability::nn {
namespace {

DenseLayer layer(std::size_t out, std::size_t in, std::vector<double> w,
                 std::vector<double> b, Activation act) {
  return {Matrix(out, in, std::move(w)), std::move(b), act};
}

Network single_sigmoid(std::size_t in, double w, double b) {
  return Network(in, {layer(1, in, std::vector<double>(in, w), {b},
                            Activation::sigmoid)});
}

Batch random_batch(std::size_t n, std::size_t dim, Rng& rng) {
  Matrix x(n, dim);
  for (double& v : x.values()) v = rng.uniform();
  std::vector<double> y(n);
  for (double& v : y) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
  return Batch(std::move(x), std::move(y));
}

testing::Rows rows_of(const Matrix& m) {
  testing::Rows rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows[r].assign(m.row(r).begin(), m.row(r).end());
  }
  return rows;
}

TEST(Activate, Relu) {
  EXPECT_EQ(activate(Activation::relu, -3.0), 0.0);
  EXPECT_EQ(activate(Activation::relu, 0.0), 0.0);
  EXPECT_EQ(activate(Activation::relu, 2.0), 2.0);
  EXPECT_EQ(activation_derivative(Activation::relu, 0.0, 0.0), 0.0);
  EXPECT_EQ(activation_derivative(Activation::relu, 1e-300, 1e-300), 1.0);
}

TEST(Activate, Sigmoid) {
  EXPECT_EQ(activate(Activation::sigmoid, 0.0), 0.5);
  // 1 / (1 + e^-2) evaluated independently to 20 digits.
  EXPECT_NEAR(activate(Activation::sigmoid, 2.0), 0.8807970779778823, 1e-16);
  EXPECT_NEAR(activate(Activation::sigmoid, -2.0), 0.11920292202211755,
              1e-17);
}

TEST(Activate, SigmoidStaysFiniteForLargeInputs) {
  for (double x : {-1e308, -800.0, -40.0, 40.0, 800.0, 1e308}) {
    const double s = activate(Activation::sigmoid, x);
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_GT(activate(Activation::sigmoid, -700.0), 0.0);
}

TEST(Activate, IdentityAndNames) {
  EXPECT_EQ(activate(Activation::identity, -4.5), -4.5);
  for (auto kind : {Activation::relu, Activation::sigmoid, Activation::identity}) {
    EXPECT_EQ(parse_activation(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_activation("tanh"));
}

TEST(DenseForward, IdentityLayerCopiesInput) {
  Rng rng(2);
  Matrix x(3, 4);
  for (double& v : x.values()) v = rng.uniform(-1, 1);
  const DenseLayer id{Matrix::identity(4), std::vector<double>(4, 0.0),
                      Activation::identity};
  EXPECT_EQ(dense_forward(id, x), x);
}

TEST(DenseForward, ZeroWeightsGiveBias) {
  const DenseLayer l{Matrix(2, 3), {1.5, -2.0}, Activation::identity};
  const Matrix out = dense_forward(l, Matrix(4, 3, 7.0));
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(out(r, 0), 1.5);
    EXPECT_EQ(out(r, 1), -2.0);
  }
}

TEST(DenseForward, HandComputedRelu) {
  const auto l = layer(2, 2, {1, 1, 0, 1}, {0.5, -0.5}, Activation::relu);
  const Matrix out = dense_forward(l, Matrix(1, 2, {1, 2}));
  EXPECT_EQ(out(0, 0), 3.5);
  EXPECT_EQ(out(0, 1), 1.5);
  EXPECT_THROW(dense_forward(l, Matrix(1, 3)), NnError);
}

TEST(Network, RejectsBadArchitectures) {
  EXPECT_THROW(Network(2, {}), NnError);
  // Output must be a single sigmoid unit.
  EXPECT_THROW(Network(2, {layer(1, 2, {1, 1}, {0}, Activation::relu)}),
               NnError);
  EXPECT_THROW(Network(2, {layer(2, 2, {1, 1, 1, 1}, {0, 0},
                                 Activation::sigmoid)}),
               NnError);
  // Layers must chain.
  EXPECT_THROW(Network(2, {layer(3, 2, std::vector<double>(6), {0, 0, 0},
                                 Activation::relu),
                           layer(1, 2, {1, 1}, {0}, Activation::sigmoid)}),
               NnError);
}

TEST(Network, InitializationIsSeededAndBounded) {
  const std::vector<LayerSpec> arch = {{8, Activation::relu},
                                       {1, Activation::sigmoid}};
  const Network a = Network::initialize(13, arch, 5);
  EXPECT_EQ(a, Network::initialize(13, arch, 5));
  EXPECT_NE(a, Network::initialize(13, arch, 6));
  const double he = std::sqrt(6.0 / 13.0);
  for (double w : a.layers()[0].weights.values()) EXPECT_LE(std::abs(w), he);
  const double glorot = std::sqrt(6.0 / 9.0);
  for (double w : a.layers()[1].weights.values()) {
    EXPECT_LE(std::abs(w), glorot);
  }
  for (double b : a.layers()[0].bias) EXPECT_EQ(b, 0.0);
}

TEST(Forward, ZeroNetworkPredictsHalf) {
  const Network net = single_sigmoid(13, 0.0, 0.0);
  Rng rng(1);
  Batch batch = random_batch(5, 13, rng);
  for (double p : forward(net, batch)) EXPECT_EQ(p, 0.5);
}

TEST(Forward, ZeroHiddenWeightsMakeOutputInputIndependent) {
  Network net(3, {layer(2, 3, std::vector<double>(6, 0.0), {0.3, -0.1},
                        Activation::relu),
                  layer(1, 2, {0.7, 1.1}, {0.2}, Activation::sigmoid)});
  Rng rng(4);
  Batch batch = random_batch(6, 3, rng);
  const auto p = forward(net, batch);
  for (double v : p) EXPECT_EQ(v, p.front());
}

TEST(Forward, MatchesDuplicateImplementation) {
  const Network net = Network::initialize(
      13, {{4, Activation::relu}, {1, Activation::sigmoid}}, 1234);
  Rng rng(99);
  Batch batch = random_batch(16, 13, rng);
  const auto p = forward(net, batch);
  const auto oracle = testing::naive_forward(net, rows_of(batch.inputs));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], oracle[i], 1e-12);
}

TEST(Forward, ClampsPredictionsAndStaysFinite) {
  Batch batch(Matrix(2, 1, {1.0, -1.0}), {1.0, 0.0});
  forward(single_sigmoid(1, 1000.0, 0.0), batch);
  EXPECT_EQ(batch.predictions[0], 1.0 - kProbabilityClamp);
  EXPECT_EQ(batch.predictions[1], kProbabilityClamp);
  EXPECT_TRUE(std::isfinite(bce_loss(batch)));
}

TEST(Forward, IntermediatesFiniteOnUnitInputs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Network net = Network::initialize(
        13, {{64, Activation::relu}, {32, Activation::relu},
             {1, Activation::sigmoid}}, seed);
    Rng rng(seed);
    Batch batch = random_batch(32, 13, rng);
    forward(net, batch);
    for (const auto& m : batch.trace->pre_activations) {
      for (double v : m.values()) ASSERT_TRUE(std::isfinite(v));
    }
  }
}

TEST(Forward, Errors) {
  Batch wrong(Matrix(2, 3), {0.0, 1.0});
  EXPECT_THROW(forward(single_sigmoid(4, 0, 0), wrong), NnError);
  Batch empty(Matrix(0, 4), {});
  EXPECT_THROW(forward(single_sigmoid(4, 0, 0), empty), NnError);
  EXPECT_THROW(Batch(Matrix(2, 3), {0.0}), NnError);
  EXPECT_THROW(Batch(Matrix(1, 3), {0.5}), NnError);
}

TEST(BceLoss, NearPerfectPrediction) {
  Batch batch(Matrix(1, 1), {1.0});
  batch.predictions = {1.0 - 1e-7};
  EXPECT_NEAR(bce_loss(batch), 1e-7, 1e-12);
}

TEST(BceLoss, HalfProbabilityIsLn2) {
  Batch one(Matrix(1, 1), {1.0});
  one.predictions = {0.5};
  EXPECT_NEAR(bce_loss(one), 0.6931471805599453, 1e-12);
  Batch two(Matrix(2, 1), {1.0, 0.0});
  two.predictions = {0.5, 0.5};
  EXPECT_NEAR(bce_loss(two), 0.6931471805599453, 1e-12);
}

TEST(BceLoss, NonNegativeOnRandomBatches) {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    Batch batch = random_batch(1 + rng.index(20), 1, rng);
    batch.predictions.resize(batch.size());
    for (double& p : batch.predictions) p = rng.uniform();
    ASSERT_GE(bce_loss(batch), 0.0);
  }
}

TEST(BceLoss, Errors) {
  Batch empty;
  EXPECT_THROW(bce_loss(empty), NnError);
  Batch unrun(Matrix(1, 1), {1.0});
  EXPECT_THROW(bce_loss(unrun), NnError);
}

TEST(Backward, ZeroWhenPredictionsEqualLabels) {
  // Saturated sigmoid: the unclamped output is exactly 1.
  const Network net = single_sigmoid(2, 0.0, 40.0);
  Batch batch(Matrix(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}), {1.0, 1.0, 1.0});
  forward(net, batch);
  const auto g = backward(net, batch);
  for (double v : g.layers[0].weights.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(g.layers[0].bias[0], 0.0);
}

TEST(Backward, SingleUnitHandChainRule) {
  const Network net = single_sigmoid(1, 0.0, 0.0);
  Batch batch(Matrix(1, 1, {1.0}), {1.0});
  forward(net, batch);
  const auto g = backward(net, batch);
  EXPECT_EQ(g.layers[0].bias[0], -0.5);
  EXPECT_EQ(g.layers[0].weights(0, 0), -0.5);
}

TEST(Backward, OutputGradientIsScaledResidual) {
  // With a single output layer, dL/db equals sum_i (p_i - y_i) / N.
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Network net(3, {layer(1, 3, {rng.uniform(-2, 2), rng.uniform(-2, 2),
                                 rng.uniform(-2, 2)},
                          {rng.uniform(-1, 1)}, Activation::sigmoid)});
    Batch batch = random_batch(1 + rng.index(16), 3, rng);
    forward(net, batch);
    double expected = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      expected += batch.trace->outputs.back()(i, 0) - batch.labels[i];
    }
    expected /= static_cast<double>(batch.size());
    EXPECT_NEAR(backward(net, batch).layers[0].bias[0], expected, 1e-15);
  }
}

TEST(Backward, ShapesMirrorParameters) {
  const Network net = Network::initialize(
      13, {{4, Activation::relu}, {1, Activation::sigmoid}}, 3);
  Rng rng(3);
  Batch batch = random_batch(5, 13, rng);
  forward(net, batch);
  const auto g = backward(net, batch);
  std::vector<std::size_t> sizes;
  for (auto v : g.views()) sizes.push_back(v.size());
  EXPECT_EQ(sizes, net.parameter_sizes());
}

TEST(Backward, RequiresForward) {
  const Network net = single_sigmoid(2, 0.0, 0.0);
  Batch batch(Matrix(1, 2), {1.0});
  try {
    backward(net, batch);
    FAIL();
  } catch (const NnError& e) {
    EXPECT_EQ(e.kind(), NnErrorKind::ForwardNotRun);
  }
  forward(net, batch);
  batch.inputs(0, 0) = 3.0;  // stale trace
  EXPECT_THROW(backward(net, batch), NnError);
}

TEST(Classify, CountsAndTieRule) {
  Batch batch(Matrix(4, 1), {1, 0, 1, 0});
  batch.predictions = {0.9, 0.1, 0.4, 0.6};
  EXPECT_EQ(classify(batch, 0.5), (ConfusionCounts{1, 1, 1, 1}));

  Batch correct(Matrix(2, 1), {1, 0});
  correct.predictions = {0.7, 0.2};
  const auto c = classify(correct);
  EXPECT_EQ(c.fp + c.fn, 0u);

  Batch tie(Matrix(1, 1), {1});
  tie.predictions = {0.5};
  EXPECT_EQ(classify(tie, 0.5).tp, 1u);
}

TEST(Classify, Errors) {
  Batch empty;
  EXPECT_THROW(classify(empty), NnError);
  Batch batch(Matrix(1, 1), {1});
  batch.predictions = {0.5};
  EXPECT_THROW(classify(batch, 0.0), NnError);
  EXPECT_THROW(classify(batch, 1.0), NnError);
}

TEST(Accuracy, Percentages) {
  EXPECT_EQ(accuracy({2, 2, 0, 0}), 100.0);
  EXPECT_EQ(accuracy({1, 2, 1, 0}), 75.0);
  EXPECT_THROW(accuracy({}), NnError);
}

TEST(Accuracy, TableShapedFigureIsConsistentWithItsCounts) {
  // 98.57% arises from 69 of 70 correct predictions: (69/70) * 100.
  const ConfusionCounts c{35, 34, 1, 0};
  EXPECT_EQ(accuracy(c), static_cast<double>(c.tp + c.tn) /
                             static_cast<double>(c.total()) * 100.0);
  EXPECT_NEAR(accuracy(c), 98.57, 0.005);
}

TEST(Accuracy, InvariantUnderThresholdPreservingTransforms) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Batch batch = random_batch(1 + rng.index(30), 1, rng);
    batch.predictions.resize(batch.size());
    for (double& p : batch.predictions) p = rng.uniform(0.01, 0.99);
    const double base = accuracy(classify(batch, 0.5));
    // p -> p^3 / (p^3 + (1-p)^3) is strictly increasing and fixes 0.5.
    for (double& p : batch.predictions) {
      const double a = p * p * p;
      const double b = (1 - p) * (1 - p) * (1 - p);
      p = a / (a + b);
    }
    ASSERT_EQ(accuracy(classify(batch, 0.5)), base);
  }
}

}  // namespace
}  // namespace likeability::nn
