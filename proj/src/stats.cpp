#include "likeability/stats.hpp"

#include <algorithm>
#include <cmath>

namespace likeability::stats {

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

namespace {

bool is_constant(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [&](double v) { return v == values.front(); });
}

}  // namespace

PearsonParts pearson(std::span<const double> x, std::span<const double> y) {
  PearsonParts parts;
  const std::size_t n = std::min(x.size(), y.size());
  x = x.first(n);
  y = y.first(n);
  if (n == 0) return parts;

  const double mean_x = mean(x);
  const double mean_y = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double count = static_cast<double>(n);
  parts.covariance = sxy / count;
  parts.std_x = std::sqrt(sxx / count);
  parts.std_y = std::sqrt(syy / count);

  // A constant series can still leave rounding residue in sxx.
  if (n < 2 || is_constant(x) || is_constant(y) || sxx == 0.0 || syy == 0.0) {
    return parts;
  }
  parts.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  parts.defined = true;
  return parts;
}

}  // namespace likeability::stats
