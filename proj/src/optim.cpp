#include "likeability/optim.hpp"

#include <cmath>
#include <string>

namespace likeability::optim {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw OptimError(OptimErrorKind::BadConfig,
                     "adam: learning rate must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw OptimError(OptimErrorKind::BadConfig,
                     "adam: beta1 and beta2 must lie in (0, 1)");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw OptimError(OptimErrorKind::BadConfig,
                     "adam: epsilon must be positive");
  }
}

AdamState adam_init(std::span<const std::size_t> parameter_sizes) {
  AdamState state;
  for (std::size_t size : parameter_sizes) {
    state.m0.emplace_back(size, 0.0);
    state.m1.emplace_back(size, 0.0);
  }
  return state;
}

void adam_step(const AdamConfig& config, AdamState& state,
               std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  config.validate();
  if (params.size() != state.m0.size() || grads.size() != state.m0.size()) {
    throw OptimError(OptimErrorKind::ShapeMismatch,
                     "adam: expected " + std::to_string(state.m0.size()) +
                         " tensors, got " + std::to_string(params.size()) +
                         " parameters and " + std::to_string(grads.size()) +
                         " gradients");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size() != state.m0[t].size() ||
        grads[t].size() != state.m0[t].size()) {
      throw OptimError(OptimErrorKind::ShapeMismatch,
                       "adam: tensor " + std::to_string(t) +
                           " has the wrong size");
    }
    for (double g : grads[t]) {
      if (!std::isfinite(g)) {
        throw OptimError(OptimErrorKind::NonFiniteGradient,
                         "adam: non-finite gradient in tensor " +
                             std::to_string(t));
      }
    }
  }

  ++state.step;
  const double step = static_cast<double>(state.step);
  const double correction0 =
      config.bias_correction ? 1.0 - std::pow(config.beta1, step) : 1.0;
  const double correction1 =
      config.bias_correction ? 1.0 - std::pow(config.beta2, step) : 1.0;

  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& m0 = state.m0[t];
    auto& m1 = state.m1[t];
    const auto w = params[t];
    const auto g = grads[t];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m0[i] = config.beta1 * m0[i] + (1.0 - config.beta1) * g[i];
      m1[i] = config.beta2 * m1[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double first = m0[i] / correction0;
      const double second = m1[i] / correction1;
      // epsilon sits inside the square root.
      w[i] -= config.learning_rate * (first / std::sqrt(second + config.epsilon));
    }
  }
}

}  // namespace likeability::optim
