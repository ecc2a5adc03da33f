#include "likeability/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "CLI11.hpp"
#include "likeability/collab.hpp"
#include "likeability/data.hpp"
#include "likeability/format.hpp"
#include "likeability/train.hpp"

namespace likeability::cli {

namespace {

namespace fs = std::filesystem;

class IoFailure : public Error {
 public:
  using Error::Error;
};

/// Writes every file or none: contents go to sibling temporaries that are
/// renamed only after all of them were written.
void commit_files(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> temps;
  auto discard = [&] {
    std::error_code ignored;
    for (const auto& t : temps) fs::remove(t, ignored);
  };
  for (const auto& [path, contents] : files) {
    fs::path temp = path;
    temp += ".partial";
    temps.push_back(temp);
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << contents) || !out.flush()) {
      discard();
      throw IoFailure(path.string() + ": cannot write file");
    }
  }
  std::vector<fs::path> committed;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files[i].first, ec);
    if (ec) {
      discard();
      for (const auto& p : committed) fs::remove(p, ec);
      throw IoFailure(files[i].first.string() + ": cannot write file (" +
                      ec.message() + ")");
    }
    committed.push_back(files[i].first);
  }
}

std::vector<nn::LayerSpec> parse_hidden(const std::string& text) {
  std::vector<nn::LayerSpec> arch;
  if (!text.empty()) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t width = 0;
      std::size_t used = 0;
      try {
        width = std::stoul(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || width == 0) {
        throw std::invalid_argument(
            "expected comma-separated positive widths, got \"" + text + "\"");
      }
      arch.push_back({width, nn::Activation::relu});
    }
  }
  arch.push_back({1, nn::Activation::sigmoid});
  return arch;
}

struct Options {
  std::string data;
  std::string ratings;
  std::string out;
  std::string metrics;
  std::string model;
  std::string user;
  std::string label_column{data::kDefaultLabelColumn};
  std::string hidden = "64,32";
  std::uint64_t seed = train::TrainConfig{}.seed;
  std::size_t epochs = train::TrainConfig{}.epochs;
  std::size_t batch_size = train::TrainConfig{}.batch_size;
  double lr = optim::AdamConfig{}.learning_rate;
  double train_fraction = train::TrainConfig{}.train_fraction;
  double threshold = nn::kDefaultThreshold;
  double lambda = collab::kDefaultLambda;
  std::size_t top = 10;
  std::size_t neighbors = 20;
  bool bias_correction = false;
};

data::LoadOptions load_options(const Options& o, bool require_label) {
  return {o.label_column, require_label};
}

int run_analyze(const Options& o, std::ostream& out) {
  const auto ds = data::load_dataset(o.data, load_options(o, true));
  const auto corr = data::correlation_matrix(ds, o.label_column);
  std::ostringstream corr_csv;
  data::write_correlation_csv(corr_csv, corr);
  std::ostringstream summary_csv;
  data::write_summary_csv(summary_csv, data::class_conditional_summary(ds));

  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure(dir.string() + ": cannot create directory");
  commit_files({{dir / "correlation.csv", corr_csv.str()},
                {dir / "summary.csv", summary_csv.str()}});
  out << "records=" << ds.size() << '\n'
      << "correlation=" << (dir / "correlation.csv").string() << '\n'
      << "summary=" << (dir / "summary.csv").string() << '\n';
  return kExitOk;
}

int run_train(const Options& o, std::ostream& out) {
  const auto ds = data::load_dataset(o.data, load_options(o, true));
  train::TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size;
  cfg.seed = o.seed;
  cfg.adam.learning_rate = o.lr;
  cfg.adam.bias_correction = o.bias_correction;
  cfg.architecture = parse_hidden(o.hidden);
  cfg.train_fraction = o.train_fraction;
  cfg.threshold = o.threshold;

  const auto result = train::train(cfg, ds);
  std::ostringstream metrics_csv;
  train::write_metrics_csv(metrics_csv, result.metrics);
  commit_files({{o.out, train::model_to_json(result.model)},
                {o.metrics, metrics_csv.str()}});

  out << "train_records=" << result.train_set.size() << '\n'
      << "validation_records=" << result.validation_set.size() << '\n';
  if (!result.metrics.empty()) {
    const auto& last = result.metrics.back();
    out << "train_accuracy=" << format_double(last.train_accuracy) << '\n'
        << "train_loss=" << format_double(last.train_loss) << '\n'
        << "val_accuracy=" << format_double(last.val_accuracy) << '\n'
        << "val_loss=" << format_double(last.val_loss) << '\n';
  }
  return kExitOk;
}

train::TrainedModel load_model_with(const Options& o, bool threshold_given) {
  auto model = train::load_model(o.model);
  if (threshold_given) model.config.threshold = o.threshold;
  return model;
}

int run_evaluate(const Options& o, bool threshold_given, std::ostream& out) {
  const auto model = load_model_with(o, threshold_given);
  const auto ds = data::load_dataset(o.data, load_options(o, true));
  const auto result = train::evaluate(model, ds);
  out << "accuracy=" << format_double(result.accuracy) << '\n'
      << "loss=" << format_double(result.loss) << '\n';
  return kExitOk;
}

int run_predict(const Options& o, bool threshold_given, std::ostream& out) {
  const auto model = load_model_with(o, threshold_given);
  const auto ds = data::load_dataset(o.data, load_options(o, false));
  if (ds.size() != 1) {
    throw data::DataError(data::DataErrorKind::MalformedRow,
                          o.data + ": expected exactly one record, found " +
                              std::to_string(ds.size()));
  }
  const auto p = train::predict(model, ds.records.front());
  out << "track_id=" << ds.records.front().track_id << '\n'
      << "probability=" << format_double(p.probability) << '\n'
      << "label=" << (p.like ? "like" : "dislike") << '\n';
  return kExitOk;
}

int run_recommend(const Options& o, bool threshold_given, std::ostream& out) {
  const auto model = load_model_with(o, threshold_given);
  const auto candidates = data::load_dataset(o.data, load_options(o, false));
  const auto ratings = collab::load_ratings(o.ratings);
  const double fallback = ratings.user_mean(o.user);

  std::vector<std::pair<std::string, double>> scored;
  for (const auto& record : candidates.records) {
    const double content = train::predict(model, record).probability;
    // Tracks nobody has rated get the user's mean as their collaborative
    // component.
    const double collab =
        ratings.has_item(record.track_id)
            ? collab::predict_rating(ratings, o.user, record.track_id,
                                     o.neighbors)
            : fallback;
    scored.emplace_back(record.track_id,
                        collab::hybrid_score(content, collab, o.lambda));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > o.top) scored.resize(o.top);
  out << "track_id,score\n";
  for (const auto& [id, score] : scored) {
    out << id << ',' << format_double(score) << '\n';
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Music likeability engine: content model training plus "
               "collaborative filtering.",
               "likeability"};
  app.require_subcommand(1);
  Options o;

  auto add_label = [&](CLI::App* cmd) {
    cmd->add_option("--label-column", o.label_column,
                    "Name of the 0/1 label column (case-insensitive)")
        ->capture_default_str();
  };
  auto add_threshold = [&](CLI::App* cmd) {
    return cmd
        ->add_option("--threshold", o.threshold,
                     "Probability at or above which a track counts as liked")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* analyze = app.add_subcommand(
      "analyze", "Write correlation.csv and summary.csv for a track dataset");
  analyze->add_option("--data", o.data, "Track CSV")->required();
  analyze->add_option("--out", o.out, "Output directory")->required();
  add_label(analyze);

  auto* train_cmd =
      app.add_subcommand("train", "Train the content model on a track CSV");
  train_cmd->add_option("--data", o.data, "Track CSV")->required();
  train_cmd->add_option("--out", o.out, "Model JSON to write")->required();
  train_cmd->add_option("--metrics", o.metrics, "Per-epoch metrics CSV")
      ->required();
  train_cmd->add_option("--seed", o.seed, "Seed for split, init and shuffling")
      ->capture_default_str();
  train_cmd->add_option("--epochs", o.epochs, "Training epochs")
      ->capture_default_str();
  train_cmd->add_option("--batch-size", o.batch_size, "Mini-batch size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", o.lr, "Adam learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--train-fraction", o.train_fraction,
                        "Share of each class used for training")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--hidden", o.hidden,
                        "Comma-separated ReLU hidden widths (empty: none)")
      ->capture_default_str()
      ->check(
          [](const std::string& text) -> std::string {
            try {
              parse_hidden(text);
            } catch (const std::invalid_argument& e) {
              return e.what();
            }
            return {};
          },
          "WIDTHS");
  train_cmd->add_flag("--bias-correction", o.bias_correction,
                      "Use bias-corrected Adam moments");
  add_threshold(train_cmd);
  add_label(train_cmd);

  auto* evaluate = app.add_subcommand(
      "evaluate", "Report accuracy and loss of a model on a labelled CSV");
  evaluate->add_option("--model", o.model, "Model JSON")->required();
  evaluate->add_option("--data", o.data, "Track CSV")->required();
  auto* eval_threshold = add_threshold(evaluate);
  add_label(evaluate);

  auto* predict = app.add_subcommand(
      "predict", "Print the like probability of a single-record CSV");
  predict->add_option("--model", o.model, "Model JSON")->required();
  predict->add_option("--data", o.data, "Track CSV with one record")
      ->required();
  auto* predict_threshold = add_threshold(predict);
  add_label(predict);

  auto* recommend = app.add_subcommand(
      "recommend", "Rank candidate tracks by the hybrid score for one user");
  recommend->add_option("--model", o.model, "Model JSON")->required();
  recommend->add_option("--data", o.data, "Candidate track CSV")->required();
  recommend->add_option("--ratings", o.ratings,
                        "Ratings CSV (user_id,track_id,rating)")
      ->required();
  recommend->add_option("--user", o.user, "Active user id")->required();
  recommend->add_option("--lambda", o.lambda,
                        "Weight of the content score in the blend")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  recommend->add_option("--top", o.top, "Number of tracks to print")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  recommend->add_option("--neighbors", o.neighbors,
                        "Neighbourhood size for collaborative prediction")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  auto* recommend_threshold = add_threshold(recommend);
  add_label(recommend);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    CLI::App* shown = &app;
    for (auto* sub : app.get_subcommands()) shown = sub;
    err << shown->help();
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return run_analyze(o, out);
    if (train_cmd->parsed()) return run_train(o, out);
    if (evaluate->parsed()) {
      return run_evaluate(o, eval_threshold->count() > 0, out);
    }
    if (predict->parsed()) {
      return run_predict(o, predict_threshold->count() > 0, out);
    }
    if (recommend->parsed()) {
      return run_recommend(o, recommend_threshold->count() > 0, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace likeability::cli
