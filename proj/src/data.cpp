#include "likeability/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "likeability/format.hpp"
#include "likeability/random.hpp"
#include "likeability/stats.hpp"

namespace likeability::data {

using detail::lower;
using detail::trim;

std::vector<std::string> canonical_feature_names() {
  return {kFeatureNames.begin(), kFeatureNames.end()};
}

std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

std::string where(const std::string& source, std::size_t row) {
  return source + ": row " + std::to_string(row);
}

}  // namespace

Dataset read_dataset(std::istream& in, const LoadOptions& options,
                     const std::string& source) {
  std::string line;
  if (!detail::next_line(in, line, true)) {
    throw DataError(DataErrorKind::EmptyDataset, source + ": no header row");
  }
  const auto header = detail::split_csv_line(line);

  auto find_column = [&](std::string_view name) -> std::optional<std::size_t> {
    const std::string wanted = lower(std::string(name));
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (lower(trim(header[c])) == wanted) return c;
    }
    return std::nullopt;
  };

  std::array<std::size_t, kFeatureCount> feature_columns{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto column = find_column(kFeatureNames[f]);
    if (!column) {
      throw DataError(DataErrorKind::MissingColumn,
                      source + ": missing column \"" +
                          std::string(kFeatureNames[f]) + "\"",
                      0, std::string(kFeatureNames[f]));
    }
    feature_columns[f] = *column;
  }
  const auto label_column = find_column(options.label_column);
  if (!label_column && options.require_label) {
    throw DataError(DataErrorKind::MissingColumn,
                    source + ": missing column \"" + options.label_column +
                        "\"",
                    0, options.label_column);
  }
  const auto id_column = find_column("track_id");

  Dataset ds;
  std::size_t row = 0;
  while (detail::next_line(in, line, false)) {
    ++row;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError(DataErrorKind::MalformedRow,
                      where(source, row) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()),
                      row);
    }
    TrackRecord record;
    record.track_id =
        id_column ? trim(fields[*id_column]) : std::to_string(row - 1);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const std::string& cell = fields[feature_columns[f]];
      if (!parse_double(cell, record.features[f])) {
        throw DataError(DataErrorKind::NonNumericCell,
                        where(source, row) + ": column \"" +
                            std::string(kFeatureNames[f]) +
                            "\" is not a finite number: \"" + cell + "\"",
                        row, std::string(kFeatureNames[f]));
      }
    }
    if (label_column) {
      double label = 0.0;
      const std::string& cell = fields[*label_column];
      if (!parse_double(cell, label) || (label != 0.0 && label != 1.0)) {
        throw DataError(DataErrorKind::BadLabel,
                        where(source, row) + ": label \"" + trim(cell) +
                            "\" is not 0 or 1",
                        row, options.label_column);
      }
      record.history = label == 1.0 ? 1 : 0;
    }
    ds.records.push_back(std::move(record));
  }
  if (ds.records.empty()) {
    throw DataError(DataErrorKind::EmptyDataset, source + ": no data rows");
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(DataErrorKind::Io,
                    path.string() + ": cannot open for reading");
  }
  return read_dataset(in, options, path.string());
}

void write_dataset(std::ostream& out, const Dataset& ds,
                   std::string_view label_column) {
  out << "track_id";
  for (const auto& name : ds.feature_names) out << ',' << name;
  out << ',' << label_column << '\n';
  for (const auto& record : ds.records) {
    out << detail::quote_csv_field(record.track_id);
    for (double v : record.features) out << ',' << format_double(v);
    out << ',' << record.history << '\n';
  }
}

ScalerParams fit_scaler(const Dataset& ds) {
  if (ds.scaled) {
    throw DataError(DataErrorKind::AlreadyScaled,
                    "fit_scaler: dataset is already scaled");
  }
  if (ds.empty()) {
    throw DataError(DataErrorKind::EmptyDataset, "fit_scaler: empty dataset");
  }
  ScalerParams params;
  params.mins = ds.records.front().features;
  params.maxs = ds.records.front().features;
  for (const auto& record : ds.records) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      params.mins[f] = std::min(params.mins[f], record.features[f]);
      params.maxs[f] = std::max(params.maxs[f], record.features[f]);
    }
  }
  return params;
}

double scale_value(const ScalerParams& params, std::size_t feature, double x) {
  const double lo = params.mins[feature];
  const double hi = params.maxs[feature];
  if (!(hi > lo)) return 0.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

FeatureVector scale_features(const ScalerParams& params,
                             const FeatureVector& features) {
  FeatureVector scaled{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    scaled[f] = scale_value(params, f, features[f]);
  }
  return scaled;
}

Dataset apply_scaler(const ScalerParams& params, const Dataset& ds) {
  if (ds.scaled) {
    throw DataError(DataErrorKind::AlreadyScaled,
                    "apply_scaler: dataset is already scaled");
  }
  Dataset out = ds;
  for (auto& record : out.records) {
    record.features = scale_features(params, record.features);
  }
  out.scaled = true;
  return out;
}

double inverse_scale(const ScalerParams& params, double value,
                     std::string_view feature) {
  const auto index = feature_index(feature);
  if (!index) {
    throw DataError(DataErrorKind::UnknownFeature,
                    "inverse_scale: unknown feature \"" +
                        std::string(feature) + "\"");
  }
  const double lo = params.mins[*index];
  const double hi = params.maxs[*index];
  return value * (hi - lo) + lo;
}

CorrelationMatrix correlation_matrix(const Dataset& ds,
                                     std::string_view label_column) {
  if (ds.size() < 2) {
    throw DataError(DataErrorKind::TooFewRecords,
                    "correlation_matrix: need at least 2 records");
  }
  const std::size_t dim = kFeatureCount + 1;
  std::vector<std::vector<double>> columns(dim,
                                           std::vector<double>(ds.size()));
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto& record = ds.records[r];
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      columns[f][r] = record.features[f];
    }
    columns[kFeatureCount][r] = static_cast<double>(record.history);
  }

  CorrelationMatrix m;
  m.labels = ds.feature_names;
  m.labels.emplace_back(label_column);
  m.values.assign(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    m.values[i * dim + i] = 1.0;
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double value = stats::pearson(columns[i], columns[j]).value;
      m.values[i * dim + j] = value;
      m.values[j * dim + i] = value;
    }
  }
  return m;
}

std::vector<ClassSummary> class_conditional_summary(const Dataset& ds) {
  std::vector<ClassSummary> summary(kFeatureCount);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    summary[f].feature = f < ds.feature_names.size()
                             ? ds.feature_names[f]
                             : std::string(kFeatureNames[f]);
    double liked = 0.0;
    double disliked = 0.0;
    for (const auto& record : ds.records) {
      if (record.history == 1) {
        liked += record.features[f];
        ++summary[f].count_liked;
      } else {
        disliked += record.features[f];
        ++summary[f].count_disliked;
      }
    }
    if (summary[f].count_liked > 0) {
      summary[f].mean_liked =
          liked / static_cast<double>(summary[f].count_liked);
    }
    if (summary[f].count_disliked > 0) {
      summary[f].mean_disliked =
          disliked / static_cast<double>(summary[f].count_disliked);
    }
  }
  return summary;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError(DataErrorKind::BadFraction,
                    "split: train fraction must lie strictly between 0 and 1");
  }
  if (ds.size() < 2) {
    throw DataError(DataErrorKind::TooFewRecords,
                    "split: need at least 2 records");
  }

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[ds.records[i].history == 1 ? 1 : 0].push_back(i);
  }

  // Per-class floor, then hand the records needed to reach the overall
  // rounded target to the classes with the largest fractional remainders
  // (class 0 first on ties).
  constexpr double kSlack = 1e-9;
  const double n = static_cast<double>(ds.size());
  const auto target =
      static_cast<std::size_t>(std::floor(train_fraction * n + 0.5 + kSlack));
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact =
        train_fraction * static_cast<double>(by_class[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact + kSlack));
    remainder[c] = exact - static_cast<double>(take[c]);
  }
  std::array<std::size_t, 2> order = {0, 1};
  if (remainder[1] > remainder[0]) order = {1, 0};
  for (std::size_t c : order) {
    if (take[0] + take[1] < target && take[c] < by_class[c].size()) ++take[c];
  }
  // Both partitions must be non-empty.
  if (take[0] + take[1] == 0) {
    take[by_class[1].size() > by_class[0].size() ? 1 : 0] = 1;
  }
  if (take[0] + take[1] == ds.size()) {
    --take[by_class[1].size() > by_class[0].size() ? 1 : 0];
  }

  Rng rng(seed);
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> val_rows;
  for (std::size_t c = 0; c < 2; ++c) {
    auto rows = by_class[c];
    rng.shuffle(rows);
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + take[c]);
    val_rows.insert(val_rows.end(), rows.begin() + take[c], rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());

  auto gather = [&](const std::vector<std::size_t>& rows) {
    Dataset part;
    part.feature_names = ds.feature_names;
    part.scaled = ds.scaled;
    part.records.reserve(rows.size());
    for (std::size_t r : rows) part.records.push_back(ds.records[r]);
    return part;
  };
  return {gather(train_rows), gather(val_rows)};
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
  out << "attribute";
  for (const auto& label : m.labels) out << ',' << label;
  out << '\n';
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out << m.labels[i];
    for (std::size_t j = 0; j < m.dim(); ++j) {
      out << ',' << format_double(m.at(i, j));
    }
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out,
                       const std::vector<ClassSummary>& summary) {
  out << "feature,mean_liked,mean_disliked,count_liked,count_disliked\n";
  for (const auto& s : summary) {
    out << s.feature << ','
        << (s.mean_liked ? format_double(*s.mean_liked) : std::string{})
        << ','
        << (s.mean_disliked ? format_double(*s.mean_disliked) : std::string{})
        << ',' << s.count_liked << ',' << s.count_disliked << '\n';
  }
}

}  // namespace likeability::data
