#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "likeability/error.hpp"

namespace likeability::data {

inline constexpr std::size_t kFeatureCount = 13;

/// Canonical feature order of every TrackRecord.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "acousticness", "danceability", "duration_ms",    "energy",
    "instrumentalness", "key",      "liveness",       "loudness",
    "mode",         "speechiness",  "tempo",          "time_signature",
    "valence"};

inline constexpr std::string_view kDefaultLabelColumn = "History";

std::vector<std::string> canonical_feature_names();

/// Index of `name` in the canonical order, if it is a feature.
std::optional<std::size_t> feature_index(std::string_view name);

enum class DataErrorKind {
  Io,
  MissingColumn,
  NonNumericCell,
  BadLabel,
  EmptyDataset,
  AlreadyScaled,
  UnknownFeature,
  TooFewRecords,
  BadFraction,
  MalformedRow,
};

class DataError : public KindedError<DataErrorKind> {
 public:
  DataError(DataErrorKind kind, const std::string& message,
            std::size_t row = 0, std::string column = {})
      : KindedError(kind, message), row_(row), column_(std::move(column)) {}

  /// 1-based data row (header excluded); 0 when not row-specific.
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

using FeatureVector = std::array<double, kFeatureCount>;

struct TrackRecord {
  std::string track_id;
  FeatureVector features{};
  int history = 0;

  bool operator==(const TrackRecord&) const = default;
};

struct Dataset {
  std::vector<TrackRecord> records;
  std::vector<std::string> feature_names = canonical_feature_names();
  bool scaled = false;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  bool operator==(const Dataset&) const = default;
};

struct LoadOptions {
  std::string label_column{kDefaultLabelColumn};
  /// When false a missing label column is accepted and every history is 0.
  bool require_label = true;
};

/// Parses the header-first CSV format. `source` names the input in
/// diagnostics. Column names match case-insensitively.
Dataset read_dataset(std::istream& in, const LoadOptions& options = {},
                     const std::string& source = "<stream>");

Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& options = {});

/// Writes track_id, the 13 features and the label column with shortest
/// round-trip decimals. read_dataset of the output reproduces `ds`.
void write_dataset(std::ostream& out, const Dataset& ds,
                   std::string_view label_column = kDefaultLabelColumn);

/// Per-feature min-max bounds.
struct ScalerParams {
  FeatureVector mins{};
  FeatureVector maxs{};

  bool operator==(const ScalerParams&) const = default;
};

ScalerParams fit_scaler(const Dataset& ds);

/// Maps one raw value into [0, 1]; degenerate features map to 0 and values
/// outside the fitted range are clamped.
double scale_value(const ScalerParams& params, std::size_t feature, double x);

FeatureVector scale_features(const ScalerParams& params,
                             const FeatureVector& features);

Dataset apply_scaler(const ScalerParams& params, const Dataset& ds);

double inverse_scale(const ScalerParams& params, double value,
                     std::string_view feature);

/// Pearson correlations among the 13 features and the label.
struct CorrelationMatrix {
  std::vector<std::string> labels;
  /// Row-major labels.size() x labels.size().
  std::vector<double> values;

  std::size_t dim() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const {
    return values[i * labels.size() + j];
  }
};

CorrelationMatrix correlation_matrix(const Dataset& ds,
                                     std::string_view label_column =
                                         kDefaultLabelColumn);

struct ClassSummary {
  std::string feature;
  std::optional<double> mean_liked;
  std::optional<double> mean_disliked;
  std::size_t count_liked = 0;
  std::size_t count_disliked = 0;
};

std::vector<ClassSummary> class_conditional_summary(const Dataset& ds);

/// Seeded stratified split into (train, validation). Each side keeps the
/// original relative record order.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);
void write_summary_csv(std::ostream& out,
                       const std::vector<ClassSummary>& summary);

}  // namespace likeability::data
