#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "likeability/error.hpp"

namespace likeability::optim {

enum class OptimErrorKind { BadConfig, ShapeMismatch, NonFiniteGradient };

using OptimError = KindedError<OptimErrorKind>;

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Off reproduces the plain update w -= lr * m0 / sqrt(m1 + eps).
  bool bias_correction = false;

  void validate() const;
  bool operator==(const AdamConfig&) const = default;
};

/// First/second moment buffers, one per parameter tensor.
struct AdamState {
  std::vector<std::vector<double>> m0;
  std::vector<std::vector<double>> m1;
  std::uint64_t step = 0;
};

AdamState adam_init(std::span<const std::size_t> parameter_sizes);

/// One Adam update in place. `params` and `grads` must list tensors of the
/// sizes the state was created for. Nothing is modified when a check fails.
void adam_step(const AdamConfig& config, AdamState& state,
               std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

}  // namespace likeability::optim
