#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "likeability/error.hpp"

namespace likeability::collab {

enum class CollabErrorKind {
  UnknownUser,
  UnknownItem,
  OutOfRange,
  BadRatingsFile,
  SameUser,
  BadK,
};

using CollabError = KindedError<CollabErrorKind>;

inline constexpr double kDefaultLambda = 0.5;

/// Sparse user x item ratings in [0, 1]. Users and items are kept in
/// ascending id order.
class RatingMatrix {
 public:
  /// Throws OutOfRange for ratings outside [0, 1] or non-finite values. A
  /// repeated (user, item) pair overwrites the earlier rating.
  void set(const std::string& user, const std::string& item, double rating);

  bool has_user(const std::string& user) const;
  bool has_item(const std::string& item) const;
  std::optional<double> rating(const std::string& user,
                               const std::string& item) const;

  /// Throws UnknownUser.
  const std::map<std::string, double>& ratings_of(
      const std::string& user) const;
  double user_mean(const std::string& user) const;

  std::vector<std::string> users() const;
  std::vector<std::string> items() const;
  std::size_t rating_count() const;

 private:
  std::map<std::string, std::map<std::string, double>> by_user_;
  std::map<std::string, std::size_t> item_refs_;
};

/// Header user_id,track_id,rating.
RatingMatrix read_ratings(std::istream& in,
                          const std::string& source = "<stream>");
RatingMatrix load_ratings(const std::filesystem::path& path);

struct SimilarityScore {
  std::string active;
  std::string other;
  double value = 0.0;
  double covariance = 0.0;
  double std_active = 0.0;
  double std_other = 0.0;
  std::size_t overlap = 0;
};

/// Pearson coefficient over co-rated items with population moments; 0 when
/// fewer than two items are shared or either side has no variance.
SimilarityScore pearson_similarity(const RatingMatrix& m,
                                   const std::string& active,
                                   const std::string& other);

/// Every other user by similarity descending, ties by id ascending, cut to k.
std::vector<SimilarityScore> top_k_neighbors(const RatingMatrix& m,
                                             const std::string& active,
                                             std::size_t k);

/// Mean-centred neighbourhood prediction, clamped to [0, 1]. The
/// neighbourhood is the k most similar users among those who rated `item`;
/// neighbours with |similarity| < 5e-13 carry no weight, and the result falls
/// back to the active user's mean when the neighbourhood has none.
double predict_rating(const RatingMatrix& m, const std::string& active,
                      const std::string& item, std::size_t k);

/// lambda * content + (1 - lambda) * collab.
double hybrid_score(double content_probability, double collab_rating,
                    double lambda = kDefaultLambda);

}  // namespace likeability::collab
