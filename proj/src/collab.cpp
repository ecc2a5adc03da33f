#include "likeability/collab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv.hpp"
#include "likeability/format.hpp"
#include "likeability/stats.hpp"

namespace likeability::collab {

void RatingMatrix::set(const std::string& user, const std::string& item,
                       double rating) {
  if (!std::isfinite(rating) || rating < 0.0 || rating > 1.0) {
    throw CollabError(CollabErrorKind::OutOfRange,
                      "rating for (" + user + ", " + item +
                          ") must lie in [0, 1]");
  }
  auto [it, inserted] = by_user_[user].insert_or_assign(item, rating);
  if (inserted) ++item_refs_[item];
}

bool RatingMatrix::has_user(const std::string& user) const {
  return by_user_.contains(user);
}

bool RatingMatrix::has_item(const std::string& item) const {
  return item_refs_.contains(item);
}

std::optional<double> RatingMatrix::rating(const std::string& user,
                                           const std::string& item) const {
  const auto u = by_user_.find(user);
  if (u == by_user_.end()) return std::nullopt;
  const auto r = u->second.find(item);
  if (r == u->second.end()) return std::nullopt;
  return r->second;
}

const std::map<std::string, double>& RatingMatrix::ratings_of(
    const std::string& user) const {
  const auto u = by_user_.find(user);
  if (u == by_user_.end()) {
    throw CollabError(CollabErrorKind::UnknownUser,
                      "unknown user \"" + user + "\"");
  }
  return u->second;
}

double RatingMatrix::user_mean(const std::string& user) const {
  const auto& ratings = ratings_of(user);
  double sum = 0.0;
  for (const auto& [item, value] : ratings) sum += value;
  return sum / static_cast<double>(ratings.size());
}

std::vector<std::string> RatingMatrix::users() const {
  std::vector<std::string> ids;
  for (const auto& [user, ratings] : by_user_) ids.push_back(user);
  return ids;
}

std::vector<std::string> RatingMatrix::items() const {
  std::vector<std::string> ids;
  for (const auto& [item, refs] : item_refs_) ids.push_back(item);
  return ids;
}

std::size_t RatingMatrix::rating_count() const {
  std::size_t count = 0;
  for (const auto& [user, ratings] : by_user_) count += ratings.size();
  return count;
}

RatingMatrix read_ratings(std::istream& in, const std::string& source) {
  using detail::lower;
  using detail::trim;

  std::string line;
  if (!detail::next_line(in, line, true)) {
    throw CollabError(CollabErrorKind::BadRatingsFile,
                      source + ": no header row");
  }
  const auto header = detail::split_csv_line(line);
  auto column = [&](const char* name) -> std::size_t {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (lower(trim(header[c])) == name) return c;
    }
    throw CollabError(CollabErrorKind::BadRatingsFile,
                      source + ": missing column \"" + name + "\"");
  };
  const std::size_t user_col = column("user_id");
  const std::size_t item_col = column("track_id");
  const std::size_t rating_col = column("rating");

  RatingMatrix m;
  std::size_t row = 0;
  while (detail::next_line(in, line, false)) {
    ++row;
    const auto fields = detail::split_csv_line(line);
    const std::string where = source + ": row " + std::to_string(row);
    if (fields.size() != header.size()) {
      throw CollabError(CollabErrorKind::BadRatingsFile,
                        where + ": wrong number of fields");
    }
    double rating = 0.0;
    if (!parse_double(fields[rating_col], rating) || rating < 0.0 ||
        rating > 1.0) {
      throw CollabError(CollabErrorKind::BadRatingsFile,
                        where + ": rating must be a number in [0, 1]");
    }
    const std::string user = trim(fields[user_col]);
    const std::string item = trim(fields[item_col]);
    if (user.empty() || item.empty()) {
      throw CollabError(CollabErrorKind::BadRatingsFile,
                        where + ": empty user_id or track_id");
    }
    m.set(user, item, rating);
  }
  return m;
}

RatingMatrix load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CollabError(CollabErrorKind::BadRatingsFile,
                      path.string() + ": cannot open for reading");
  }
  return read_ratings(in, path.string());
}

SimilarityScore pearson_similarity(const RatingMatrix& m,
                                   const std::string& active,
                                   const std::string& other) {
  if (active == other) {
    throw CollabError(CollabErrorKind::SameUser,
                      "pearson_similarity: users must differ");
  }
  const auto& ra = m.ratings_of(active);
  const auto& ru = m.ratings_of(other);

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [item, value] : ra) {
    const auto it = ru.find(item);
    if (it == ru.end()) continue;
    xs.push_back(value);
    ys.push_back(it->second);
  }
  const auto parts = stats::pearson(xs, ys);

  SimilarityScore score;
  score.active = active;
  score.other = other;
  score.overlap = xs.size();
  score.covariance = parts.covariance;
  score.std_active = parts.std_x;
  score.std_other = parts.std_y;
  score.value = parts.value;
  return score;
}

namespace {

// Similarities are ranked on a 1e-12 grid so that mathematically equal
// coefficients that differ only by rounding still tie and fall back to the id.
constexpr double kRankResolution = 1e12;

double rank_key(double value) { return std::round(value * kRankResolution); }

void sort_neighbors(std::vector<SimilarityScore>& scores) {
  std::sort(scores.begin(), scores.end(),
            [](const SimilarityScore& a, const SimilarityScore& b) {
              const double ka = rank_key(a.value);
              const double kb = rank_key(b.value);
              if (ka != kb) return ka > kb;
              return a.other < b.other;
            });
}

}  // namespace

std::vector<SimilarityScore> top_k_neighbors(const RatingMatrix& m,
                                             const std::string& active,
                                             std::size_t k) {
  if (k < 1) {
    throw CollabError(CollabErrorKind::BadK, "top_k_neighbors: k must be >= 1");
  }
  m.ratings_of(active);
  std::vector<SimilarityScore> scores;
  for (const auto& user : m.users()) {
    if (user != active) scores.push_back(pearson_similarity(m, active, user));
  }
  sort_neighbors(scores);
  if (scores.size() > k) scores.resize(k);
  return scores;
}

double predict_rating(const RatingMatrix& m, const std::string& active,
                      const std::string& item, std::size_t k) {
  if (k < 1) {
    throw CollabError(CollabErrorKind::BadK, "predict_rating: k must be >= 1");
  }
  const double mean_active = m.user_mean(active);
  if (!m.has_item(item)) {
    throw CollabError(CollabErrorKind::UnknownItem,
                      "unknown item \"" + item + "\"");
  }

  std::vector<SimilarityScore> raters;
  for (const auto& user : m.users()) {
    if (user == active || !m.rating(user, item)) continue;
    raters.push_back(pearson_similarity(m, active, user));
  }
  sort_neighbors(raters);
  if (raters.size() > k) raters.resize(k);

  double numerator = 0.0;
  double weight = 0.0;
  for (const auto& neighbor : raters) {
    // Below the ranking resolution a similarity is indistinguishable from 0.
    if (rank_key(neighbor.value) == 0.0) continue;
    const double deviation =
        *m.rating(neighbor.other, item) - m.user_mean(neighbor.other);
    numerator += neighbor.value * deviation;
    weight += std::abs(neighbor.value);
  }
  if (weight == 0.0) return mean_active;
  return std::clamp(mean_active + numerator / weight, 0.0, 1.0);
}

double hybrid_score(double content_probability, double collab_rating,
                    double lambda) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(content_probability) || !in_unit(collab_rating) ||
      !in_unit(lambda)) {
    throw CollabError(CollabErrorKind::OutOfRange,
                      "hybrid_score: arguments must lie in [0, 1]");
  }
  return std::clamp(
      lambda * content_probability + (1.0 - lambda) * collab_rating, 0.0, 1.0);
}

}  // namespace likeability::collab
