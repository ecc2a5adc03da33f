#include "likeability/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "likeability/random.hpp"

namespace likeability::nn {

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::relu:
      return "relu";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::identity:
      return "identity";
  }
  return "identity";
}

std::optional<Activation> parse_activation(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "sigmoid") return Activation::sigmoid;
  if (text == "identity") return Activation::identity;
  return std::nullopt;
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::sigmoid:
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case Activation::identity:
      return x;
  }
  return x;
}

double activation_derivative(Activation kind, double z, double a) {
  switch (kind) {
    case Activation::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid:
      return a * (1.0 - a);
    case Activation::identity:
      return 1.0;
  }
  return 1.0;
}

namespace {

Matrix pre_activation(const DenseLayer& layer, const Matrix& input) {
  if (input.cols() != layer.in_dim()) {
    throw NnError(NnErrorKind::DimensionMismatch,
                  "dense_forward: input has " + std::to_string(input.cols()) +
                      " columns, layer expects " +
                      std::to_string(layer.in_dim()));
  }
  Matrix z = matmul_transposed(input, layer.weights);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
  }
  return z;
}

Matrix apply_activation(Activation kind, const Matrix& z) {
  Matrix a = z;
  for (double& v : a.values()) v = activate(kind, v);
  return a;
}

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

}  // namespace

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
  return apply_activation(layer.activation, pre_activation(layer, input));
}

Network::Network(std::size_t input_dim, std::vector<DenseLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw NnError(NnErrorKind::BadArchitecture, "Network: no layers");
  }
  std::size_t expected = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.in_dim() != expected || layer.bias.size() != layer.out_dim() ||
        layer.out_dim() == 0) {
      throw NnError(NnErrorKind::BadArchitecture,
                    "Network: layer " + std::to_string(l) +
                        " does not chain (expected input width " +
                        std::to_string(expected) + ")");
    }
    expected = layer.out_dim();
  }
  const auto& last = layers_.back();
  if (last.out_dim() != 1 || last.activation != Activation::sigmoid) {
    throw NnError(NnErrorKind::BadArchitecture,
                  "Network: final layer must be a single sigmoid unit");
  }
}

Network Network::initialize(std::size_t input_dim,
                            const std::vector<LayerSpec>& architecture,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  std::size_t fan_in = input_dim;
  for (const auto& spec : architecture) {
    DenseLayer layer;
    layer.activation = spec.activation;
    layer.weights = Matrix(spec.width, fan_in);
    layer.bias.assign(spec.width, 0.0);
    const double limit =
        spec.activation == Activation::relu
            ? std::sqrt(6.0 / static_cast<double>(fan_in))
            : std::sqrt(6.0 / static_cast<double>(fan_in + spec.width));
    for (double& w : layer.weights.values()) w = rng.uniform(-limit, limit);
    layers.push_back(std::move(layer));
    fan_in = spec.width;
  }
  return Network(input_dim, std::move(layers));
}

std::vector<std::span<double>> Network::parameters() {
  std::vector<std::span<double>> views;
  for (auto& layer : layers_) {
    views.emplace_back(layer.weights.values());
    views.emplace_back(layer.bias);
  }
  return views;
}

std::vector<std::size_t> Network::parameter_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& layer : layers_) {
    sizes.push_back(layer.weights.size());
    sizes.push_back(layer.bias.size());
  }
  return sizes;
}

Batch::Batch(Matrix in, std::vector<double> y)
    : inputs(std::move(in)), labels(std::move(y)) {
  if (inputs.rows() != labels.size()) {
    throw NnError(NnErrorKind::DimensionMismatch,
                  "Batch: " + std::to_string(inputs.rows()) + " rows but " +
                      std::to_string(labels.size()) + " labels");
  }
  for (double label : labels) {
    if (label != 0.0 && label != 1.0) {
      throw NnError(NnErrorKind::BadLabel, "Batch: labels must be 0 or 1");
    }
  }
}

const std::vector<double>& forward(const Network& net, Batch& batch) {
  if (batch.inputs.rows() == 0) {
    throw NnError(NnErrorKind::EmptyBatch, "forward: empty batch");
  }
  if (batch.inputs.cols() != net.input_dim()) {
    throw NnError(NnErrorKind::DimensionMismatch,
                  "forward: batch has " + std::to_string(batch.inputs.cols()) +
                      " features, network expects " +
                      std::to_string(net.input_dim()));
  }
  ForwardTrace trace;
  Matrix current = batch.inputs;
  for (const auto& layer : net.layers()) {
    Matrix z = pre_activation(layer, current);
    Matrix a = apply_activation(layer.activation, z);
    trace.inputs.push_back(std::move(current));
    trace.pre_activations.push_back(std::move(z));
    current = a;
    trace.outputs.push_back(std::move(a));
  }
  batch.predictions.resize(current.rows());
  for (std::size_t r = 0; r < current.rows(); ++r) {
    batch.predictions[r] = clamp_probability(current(r, 0));
  }
  batch.trace = std::move(trace);
  return batch.predictions;
}

std::vector<double> predict_probabilities(const Network& net,
                                          const Matrix& inputs) {
  Matrix current = inputs;
  for (const auto& layer : net.layers()) current = dense_forward(layer, current);
  std::vector<double> p(current.rows());
  for (std::size_t r = 0; r < current.rows(); ++r) p[r] = current(r, 0);
  return p;
}

double bce_loss(const Batch& batch) {
  if (batch.size() == 0) {
    throw NnError(NnErrorKind::EmptyBatch, "bce_loss: empty batch");
  }
  if (batch.predictions.size() != batch.size()) {
    throw NnError(NnErrorKind::ForwardNotRun,
                  "bce_loss: predictions not populated");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double y = batch.labels[i];
    const double p = clamp_probability(batch.predictions[i]);
    sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(batch.size());
}

std::vector<std::span<const double>> Gradients::views() const {
  std::vector<std::span<const double>> out;
  for (const auto& layer : layers) {
    out.emplace_back(layer.weights.values());
    out.emplace_back(layer.bias);
  }
  return out;
}

Gradients backward(const Network& net, const Batch& batch) {
  const auto& layers = net.layers();
  if (!batch.trace || batch.trace->outputs.size() != layers.size() ||
      batch.trace->inputs.front().rows() != batch.size() ||
      batch.trace->inputs.front() != batch.inputs) {
    throw NnError(NnErrorKind::ForwardNotRun,
                  "backward: forward has not been run on this batch");
  }
  const auto& trace = *batch.trace;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (trace.inputs[l].cols() != layers[l].in_dim() ||
        trace.outputs[l].cols() != layers[l].out_dim()) {
      throw NnError(NnErrorKind::ForwardNotRun,
                    "backward: trace does not match the network");
    }
  }

  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  // dLoss/dz for the output layer: sigmoid and cross-entropy cancel.
  Matrix delta(n, 1);
  for (std::size_t r = 0; r < n; ++r) {
    delta(r, 0) = (trace.outputs.back()(r, 0) - batch.labels[r]) * inv_n;
  }

  Gradients grads;
  grads.layers.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const Matrix& input = trace.inputs[l];
    auto& g = grads.layers[l];
    g.weights = Matrix(layer.out_dim(), layer.in_dim());
    g.bias.assign(layer.out_dim(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto x = input.row(r);
      for (std::size_t o = 0; o < layer.out_dim(); ++o) {
        const double d = delta(r, o);
        g.bias[o] += d;
        auto w_row = g.weights.row(o);
        for (std::size_t i = 0; i < x.size(); ++i) w_row[i] += d * x[i];
      }
    }
    if (l == 0) break;

    const auto& below = layers[l - 1];
    const Matrix upstream = matmul(delta, layer.weights);  // n x in_dim
    Matrix next(n, layer.in_dim());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < layer.in_dim(); ++i) {
        next(r, i) = upstream(r, i) *
                     activation_derivative(below.activation,
                                           trace.pre_activations[l - 1](r, i),
                                           trace.outputs[l - 1](r, i));
      }
    }
    delta = std::move(next);
  }
  return grads;
}

ConfusionCounts classify(std::span<const double> predictions,
                         std::span<const double> labels, double threshold) {
  if (predictions.empty()) {
    throw NnError(NnErrorKind::EmptyBatch, "classify: empty batch");
  }
  if (predictions.size() != labels.size()) {
    throw NnError(NnErrorKind::DimensionMismatch,
                  "classify: predictions and labels differ in length");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw NnError(NnErrorKind::BadThreshold,
                  "classify: threshold must lie strictly between 0 and 1");
  }
  ConfusionCounts counts;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool like = predictions[i] >= threshold;
    const bool liked = labels[i] == 1.0;
    if (like && liked) ++counts.tp;
    if (!like && !liked) ++counts.tn;
    if (like && !liked) ++counts.fp;
    if (!like && liked) ++counts.fn;
  }
  return counts;
}

ConfusionCounts classify(const Batch& batch, double threshold) {
  if (batch.size() == 0) {
    throw NnError(NnErrorKind::EmptyBatch, "classify: empty batch");
  }
  if (batch.predictions.size() != batch.size()) {
    throw NnError(NnErrorKind::ForwardNotRun,
                  "classify: predictions not populated");
  }
  return classify(batch.predictions, batch.labels, threshold);
}

double accuracy(const ConfusionCounts& counts) {
  if (counts.total() == 0) {
    throw NnError(NnErrorKind::EmptyCounts, "accuracy: no predictions");
  }
  return static_cast<double>(counts.tp + counts.tn) /
         static_cast<double>(counts.total()) * 100.0;
}

}  // namespace likeability::nn
