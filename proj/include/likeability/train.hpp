#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "likeability/data.hpp"
#include "likeability/nn.hpp"
#include "likeability/optim.hpp"

namespace likeability::train {

enum class TrainErrorKind {
  BadConfig,
  SingleClassDataset,
  SchemaMismatch,
  Io,
  BadModelFile,
};

using TrainError = KindedError<TrainErrorKind>;

inline constexpr int kModelFormatVersion = 1;

std::vector<nn::LayerSpec> default_architecture();

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  optim::AdamConfig adam;
  std::vector<nn::LayerSpec> architecture = default_architecture();
  double train_fraction = 0.8;
  double threshold = nn::kDefaultThreshold;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double train_accuracy = 0.0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_loss = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

struct TrainedModel {
  nn::Network network;
  data::ScalerParams scaler;
  TrainConfig config;
  std::vector<std::string> feature_names = data::canonical_feature_names();
  int format_version = kModelFormatVersion;

  bool operator==(const TrainedModel&) const = default;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochMetrics> metrics;
  /// Unscaled partitions the run used.
  data::Dataset train_set;
  data::Dataset validation_set;
};

/// The network a run with `config` starts from.
nn::Network initial_network(const TrainConfig& config);

/// Splits, fits the scaler on the training partition, and runs seeded
/// mini-batch Adam. Metrics are full-partition values at each epoch end.
TrainResult train(const TrainConfig& config, const data::Dataset& ds);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
  nn::ConfusionCounts counts;
};

/// Accepts raw data (the model's scaler is applied) or data already scaled by
/// that scaler.
Evaluation evaluate(const TrainedModel& model, const data::Dataset& ds);

struct Prediction {
  double probability = 0.5;
  bool like = true;
};

Prediction predict(const TrainedModel& model, const data::TrackRecord& record);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

void write_metrics_csv(std::ostream& out,
                       std::span<const EpochMetrics> metrics);

}  // namespace likeability::train
