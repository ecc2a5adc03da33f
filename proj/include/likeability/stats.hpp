#pragma once

#include <cstddef>
#include <span>

namespace likeability::stats {

/// Components of a Pearson coefficient computed with population moments.
struct PearsonParts {
  double covariance = 0.0;
  double std_x = 0.0;
  double std_y = 0.0;
  /// 0 when either series is constant or shorter than two samples.
  double value = 0.0;
  bool defined = false;
};

/// Two-pass Pearson correlation of equally sized series. The result is
/// clamped to [-1, 1].
PearsonParts pearson(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);

}  // namespace likeability::stats
