// Writes the bundled surrogate track dataset used by the examples and the
// acceptance suite.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "likeability/data.hpp"
#include "synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic Spotify-shaped track CSV"};
  std::size_t rows = 600;
  std::uint64_t seed = 2024;
  std::string out;
  std::string kind = "surrogate";
  app.add_option("--rows", rows, "Number of tracks")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--kind", kind, "surrogate | separable | random")
      ->capture_default_str()
      ->check(CLI::IsMember({"surrogate", "separable", "random"}));
  std::string ratings;
  std::size_t users = 12;
  app.add_option("--out", out, "Output CSV")->required();
  app.add_option("--ratings", ratings,
                 "Also write user_id,track_id,rating rows for these tracks");
  app.add_option("--users", users, "Users in the ratings file")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  using namespace likeability;
  const data::Dataset ds =
      kind == "separable" ? testing::make_separable_tracks(rows, seed)
      : kind == "random"  ? testing::make_random_tracks(rows, seed)
                          : testing::make_surrogate_tracks(rows, seed);
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    std::cerr << "error: " << out << ": cannot write\n";
    return 1;
  }
  data::write_dataset(file, ds);
  if (!ratings.empty()) {
    std::ofstream rfile(ratings, std::ios::binary);
    if (!rfile) {
      std::cerr << "error: " << ratings << ": cannot write\n";
      return 1;
    }
    rfile << testing::make_ratings_csv(ds, users, seed + 1);
  }
  return 0;
}
