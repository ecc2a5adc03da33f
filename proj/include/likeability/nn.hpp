#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "likeability/matrix.hpp"

namespace likeability::nn {

enum class Activation { relu, sigmoid, identity };

std::string_view to_string(Activation kind);
std::optional<Activation> parse_activation(std::string_view text);

double activate(Activation kind, double x);

/// Derivative with respect to the pre-activation `z`; `a` is activate(z).
/// ReLU at exactly 0 has derivative 0.
double activation_derivative(Activation kind, double z, double a);

/// Predictions are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
/// before entering the loss.
inline constexpr double kProbabilityClamp = 1e-7;
inline constexpr double kDefaultThreshold = 0.5;

struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  std::vector<double> bias;
  Activation activation = Activation::identity;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  bool operator==(const DenseLayer&) const = default;
};

/// activation(input * W^T + b), input is N x in_dim.
Matrix dense_forward(const DenseLayer& layer, const Matrix& input);

struct LayerSpec {
  std::size_t width = 1;
  Activation activation = Activation::relu;

  bool operator==(const LayerSpec&) const = default;
};

class Network {
 public:
  Network() = default;
  /// Throws BadArchitecture unless the layers chain from input_dim and end in
  /// a single sigmoid unit.
  Network(std::size_t input_dim, std::vector<DenseLayer> layers);

  /// He-uniform weights for ReLU layers, Glorot-uniform otherwise; zero
  /// biases.
  static Network initialize(std::size_t input_dim,
                            const std::vector<LayerSpec>& architecture,
                            std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Flat views of every parameter tensor in (W0, b0, W1, b1, ...) order.
  std::vector<std::span<double>> parameters();
  std::vector<std::size_t> parameter_sizes() const;

  bool operator==(const Network&) const = default;

 private:
  std::size_t input_dim_ = 0;
  std::vector<DenseLayer> layers_;
};

/// Intermediate values kept by forward() for backward().
struct ForwardTrace {
  std::vector<Matrix> inputs;          // input to each layer
  std::vector<Matrix> pre_activations;  // z of each layer
  std::vector<Matrix> outputs;          // activation(z) of each layer
};

struct Batch {
  Matrix inputs;               // N x input_dim
  std::vector<double> labels;  // y in {0, 1}
  /// Clamped sigmoid outputs, populated by forward().
  std::vector<double> predictions;
  std::optional<ForwardTrace> trace;

  Batch() = default;
  Batch(Matrix inputs, std::vector<double> labels);

  std::size_t size() const { return labels.size(); }
};

/// Runs every layer, stores the clamped predictions and the trace in `batch`
/// and returns the predictions.
const std::vector<double>& forward(const Network& net, Batch& batch);

/// Unclamped sigmoid outputs for each row of `inputs`.
std::vector<double> predict_probabilities(const Network& net,
                                          const Matrix& inputs);

/// Mean binary cross-entropy of the stored predictions.
double bce_loss(const Batch& batch);

struct LayerGradient {
  Matrix weights;
  std::vector<double> bias;
};

struct Gradients {
  std::vector<LayerGradient> layers;

  /// Flat views in the same order as Network::parameters().
  std::vector<std::span<const double>> views() const;
};

/// Reverse-mode gradients of bce_loss with respect to every parameter. The
/// output layer's pre-activation gradient is (p - y) / N with p the
/// unclamped sigmoid output.
Gradients backward(const Network& net, const Batch& batch);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Predicts "like" when p >= threshold.
ConfusionCounts classify(const Batch& batch,
                         double threshold = kDefaultThreshold);
ConfusionCounts classify(std::span<const double> predictions,
                         std::span<const double> labels,
                         double threshold = kDefaultThreshold);

/// (TP + TN) / total * 100.
double accuracy(const ConfusionCounts& counts);

}  // namespace likeability::nn
