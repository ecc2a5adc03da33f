#include "likeability/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "likeability/format.hpp"
#include "likeability/random.hpp"

namespace likeability::train {

namespace {

using nlohmann::ordered_json;

// Sub-seed streams drawn from TrainConfig::seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

[[noreturn]] void bad_config(const std::string& what) {
  throw TrainError(TrainErrorKind::BadConfig, "train config: " + what);
}

struct Partition {
  nn::Matrix inputs;
  std::vector<double> labels;
};

Partition to_partition(const data::Dataset& ds) {
  Partition part{nn::Matrix(ds.size(), data::kFeatureCount), {}};
  part.labels.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto& features = ds.records[r].features;
    std::copy(features.begin(), features.end(), part.inputs.row(r).begin());
    part.labels.push_back(static_cast<double>(ds.records[r].history));
  }
  return part;
}

Evaluation evaluate_partition(const nn::Network& net, const Partition& part,
                              double threshold) {
  nn::Batch batch(part.inputs, part.labels);
  nn::forward(net, batch);
  Evaluation result;
  result.counts = nn::classify(batch, threshold);
  result.accuracy = nn::accuracy(result.counts);
  result.loss = nn::bce_loss(batch);
  return result;
}

void check_schema(const TrainedModel& model,
                  const std::vector<std::string>& names) {
  if (names != model.feature_names) {
    throw TrainError(TrainErrorKind::SchemaMismatch,
                     "feature names or order differ from the model's");
  }
  if (model.feature_names != data::canonical_feature_names()) {
    throw TrainError(TrainErrorKind::SchemaMismatch,
                     "model feature order is not the canonical order");
  }
}

}  // namespace

std::vector<nn::LayerSpec> default_architecture() {
  return {{64, nn::Activation::relu},
          {32, nn::Activation::relu},
          {1, nn::Activation::sigmoid}};
}

void TrainConfig::validate() const {
  if (batch_size < 1) bad_config("batch_size must be at least 1");
  if (architecture.empty()) bad_config("architecture is empty");
  for (const auto& spec : architecture) {
    if (spec.width < 1) bad_config("layer widths must be at least 1");
  }
  if (architecture.back().width != 1 ||
      architecture.back().activation != nn::Activation::sigmoid) {
    bad_config("final layer must be (1, sigmoid)");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    bad_config("train_fraction must lie strictly between 0 and 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    bad_config("threshold must lie strictly between 0 and 1");
  }
  try {
    adam.validate();
  } catch (const optim::OptimError& e) {
    bad_config(e.what());
  }
}

nn::Network initial_network(const TrainConfig& config) {
  config.validate();
  return nn::Network::initialize(data::kFeatureCount, config.architecture,
                                 derive_seed(config.seed, kInitStream));
}

TrainResult train(const TrainConfig& config, const data::Dataset& ds) {
  config.validate();
  if (ds.empty()) {
    throw data::DataError(data::DataErrorKind::EmptyDataset,
                          "train: empty dataset");
  }
  if (ds.scaled) {
    throw data::DataError(data::DataErrorKind::AlreadyScaled,
                          "train: expects unscaled data");
  }
  if (ds.feature_names != data::canonical_feature_names()) {
    throw TrainError(TrainErrorKind::SchemaMismatch,
                     "train: dataset is not in canonical feature order");
  }
  std::size_t liked = 0;
  for (const auto& record : ds.records) liked += record.history == 1 ? 1 : 0;
  if (liked == 0 || liked == ds.size()) {
    throw TrainError(TrainErrorKind::SingleClassDataset,
                     "train: both liked and disliked tracks are required");
  }

  TrainResult result;
  std::tie(result.train_set, result.validation_set) = data::split(
      ds, config.train_fraction, derive_seed(config.seed, kSplitStream));

  TrainedModel& model = result.model;
  model.config = config;
  model.scaler = data::fit_scaler(result.train_set);
  model.network = initial_network(config);

  const Partition train_part =
      to_partition(data::apply_scaler(model.scaler, result.train_set));
  const Partition val_part =
      to_partition(data::apply_scaler(model.scaler, result.validation_set));

  optim::AdamState adam = optim::adam_init(model.network.parameter_sizes());
  Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
  const std::size_t n = train_part.labels.size();
  std::vector<std::size_t> order(n);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      nn::Matrix inputs(end - start, data::kFeatureCount);
      std::vector<double> labels;
      labels.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const auto src = train_part.inputs.row(order[i]);
        std::copy(src.begin(), src.end(), inputs.row(i - start).begin());
        labels.push_back(train_part.labels[order[i]]);
      }
      nn::Batch batch(std::move(inputs), std::move(labels));
      nn::forward(model.network, batch);
      const nn::Gradients grads = nn::backward(model.network, batch);
      const auto params = model.network.parameters();
      const auto grad_views = grads.views();
      optim::adam_step(config.adam, adam, params, grad_views);
    }

    const Evaluation train_eval =
        evaluate_partition(model.network, train_part, config.threshold);
    const Evaluation val_eval =
        evaluate_partition(model.network, val_part, config.threshold);
    result.metrics.push_back({epoch, train_eval.accuracy, train_eval.loss,
                              val_eval.accuracy, val_eval.loss});
  }
  return result;
}

Evaluation evaluate(const TrainedModel& model, const data::Dataset& ds) {
  check_schema(model, ds.feature_names);
  if (ds.empty()) {
    throw data::DataError(data::DataErrorKind::EmptyDataset,
                          "evaluate: empty dataset");
  }
  const data::Dataset scaled =
      ds.scaled ? ds : data::apply_scaler(model.scaler, ds);
  return evaluate_partition(model.network, to_partition(scaled),
                            model.config.threshold);
}

Prediction predict(const TrainedModel& model,
                   const data::TrackRecord& record) {
  check_schema(model, data::canonical_feature_names());
  const auto scaled = data::scale_features(model.scaler, record.features);
  nn::Matrix input(1, data::kFeatureCount,
                   std::vector<double>(scaled.begin(), scaled.end()));
  nn::Batch batch(std::move(input), {static_cast<double>(record.history)});
  const double p = nn::forward(model.network, batch).front();
  return {p, p >= model.config.threshold};
}

std::string model_to_json(const TrainedModel& model) {
  ordered_json doc;
  doc["format_version"] = model.format_version;
  doc["feature_names"] = model.feature_names;
  doc["scaler"] = {
      {"mins", std::vector<double>(model.scaler.mins.begin(),
                                   model.scaler.mins.end())},
      {"maxs", std::vector<double>(model.scaler.maxs.begin(),
                                   model.scaler.maxs.end())}};
  ordered_json layers = ordered_json::array();
  for (const auto& layer : model.network.layers()) {
    const auto weights = layer.weights.values();
    layers.push_back(
        {{"rows", layer.weights.rows()},
         {"cols", layer.weights.cols()},
         {"weights", std::vector<double>(weights.begin(), weights.end())},
         {"bias", layer.bias},
         {"activation", std::string(nn::to_string(layer.activation))}});
  }
  doc["layers"] = std::move(layers);
  const auto& cfg = model.config;
  doc["config"] = {{"epochs", cfg.epochs},
                   {"batch_size", cfg.batch_size},
                   {"seed", cfg.seed},
                   {"adam",
                    {{"learning_rate", cfg.adam.learning_rate},
                     {"beta1", cfg.adam.beta1},
                     {"beta2", cfg.adam.beta2},
                     {"epsilon", cfg.adam.epsilon},
                     {"bias_correction", cfg.adam.bias_correction}}},
                   {"threshold", cfg.threshold},
                   {"train_fraction", cfg.train_fraction}};
  return doc.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  try {
    const auto doc = ordered_json::parse(text);
    TrainedModel model;
    model.format_version = doc.at("format_version").get<int>();
    if (model.format_version != kModelFormatVersion) {
      throw TrainError(TrainErrorKind::BadModelFile,
                       "model: unsupported format_version " +
                           std::to_string(model.format_version));
    }
    model.feature_names =
        doc.at("feature_names").get<std::vector<std::string>>();
    const auto mins = doc.at("scaler").at("mins").get<std::vector<double>>();
    const auto maxs = doc.at("scaler").at("maxs").get<std::vector<double>>();
    if (model.feature_names.size() != data::kFeatureCount ||
        mins.size() != data::kFeatureCount ||
        maxs.size() != data::kFeatureCount) {
      throw TrainError(TrainErrorKind::BadModelFile,
                       "model: expected 13 features and scaler entries");
    }
    std::copy(mins.begin(), mins.end(), model.scaler.mins.begin());
    std::copy(maxs.begin(), maxs.end(), model.scaler.maxs.begin());

    std::vector<nn::DenseLayer> layers;
    std::vector<nn::LayerSpec> architecture;
    for (const auto& entry : doc.at("layers")) {
      nn::DenseLayer layer;
      const auto rows = entry.at("rows").get<std::size_t>();
      const auto cols = entry.at("cols").get<std::size_t>();
      layer.weights =
          nn::Matrix(rows, cols, entry.at("weights").get<std::vector<double>>());
      layer.bias = entry.at("bias").get<std::vector<double>>();
      const auto activation =
          nn::parse_activation(entry.at("activation").get<std::string>());
      if (!activation) {
        throw TrainError(TrainErrorKind::BadModelFile,
                         "model: unknown activation");
      }
      layer.activation = *activation;
      architecture.push_back({rows, *activation});
      layers.push_back(std::move(layer));
    }
    if (layers.empty()) {
      throw TrainError(TrainErrorKind::BadModelFile, "model: no layers");
    }
    const std::size_t input_dim = layers.front().in_dim();
    model.network = nn::Network(input_dim, std::move(layers));
    if (model.network.input_dim() != data::kFeatureCount) {
      throw TrainError(TrainErrorKind::BadModelFile,
                       "model: network input width is not 13");
    }

    const auto& cfg = doc.at("config");
    model.config.epochs = cfg.at("epochs").get<std::size_t>();
    model.config.batch_size = cfg.at("batch_size").get<std::size_t>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    const auto& adam = cfg.at("adam");
    model.config.adam.learning_rate = adam.at("learning_rate").get<double>();
    model.config.adam.beta1 = adam.at("beta1").get<double>();
    model.config.adam.beta2 = adam.at("beta2").get<double>();
    model.config.adam.epsilon = adam.at("epsilon").get<double>();
    model.config.adam.bias_correction =
        adam.at("bias_correction").get<bool>();
    model.config.threshold = cfg.at("threshold").get<double>();
    model.config.train_fraction =
        cfg.value("train_fraction", TrainConfig{}.train_fraction);
    model.config.architecture = std::move(architecture);
    model.config.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw TrainError(TrainErrorKind::BadModelFile,
                     std::string("model: ") + e.what());
  } catch (const nn::NnError& e) {
    throw TrainError(TrainErrorKind::BadModelFile,
                     std::string("model: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  const std::string text = model_to_json(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw TrainError(TrainErrorKind::Io,
                     path.string() + ": cannot write model file");
  }
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TrainError(TrainErrorKind::Io,
                     path.string() + ": cannot open model file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return model_from_json(text.str());
  } catch (const TrainError& e) {
    throw TrainError(e.kind(), path.string() + ": " + e.what());
  }
}

void write_metrics_csv(std::ostream& out,
                       std::span<const EpochMetrics> metrics) {
  out << "epoch,train_accuracy,train_loss,val_accuracy,val_loss\n";
  for (const auto& m : metrics) {
    out << m.epoch << ',' << format_double(m.train_accuracy) << ','
        << format_double(m.train_loss) << ',' << format_double(m.val_accuracy)
        << ',' << format_double(m.val_loss) << '\n';
  }
}

}  // namespace likeability::train
