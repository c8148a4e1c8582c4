#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poicalib/train_data.hpp"

namespace poicalib {

struct ScoredEntry {
  std::string item_id;
  double score = 0.0;

  friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

/// A user's ranked items, descending by (score, then item id ascending).
struct ScoredList {
  std::string user_id;
  std::vector<ScoredEntry> entries;
  std::string origin;

  std::vector<std::string> item_ids() const;
  friend bool operator==(const ScoredList&, const ScoredList&) = default;
};

inline constexpr std::size_t kBaseListSize = 150;
inline constexpr std::size_t kFinalListSize = 10;

/// Fit-once, score-many contract shared by BPR, USG and LORE.
///
/// score() must be a pure function of the fitted state: it is called
/// concurrently for different users.
class Recommender {
 public:
  explicit Recommender(std::shared_ptr<const TrainData> data) : data_(std::move(data)) {}
  virtual ~Recommender() = default;

  virtual std::string_view tag() const = 0;

  /// Scores `candidates` (sorted, unique) for user u into `out`. Models that
  /// normalise per user do so over exactly this candidate set.
  virtual void score(UserIndex u, std::span<const ItemIndex> candidates,
                     std::span<double> out) const = 0;

  const TrainData& data() const noexcept { return *data_; }
  std::shared_ptr<const TrainData> shared_data() const noexcept { return data_; }

 private:
  std::shared_ptr<const TrainData> data_;
};

/// Catalogue items the user has not seen in train and that are not in
/// `excluded` (sorted).
std::vector<ItemIndex> candidate_items(const TrainData& data, UserIndex u,
                                       std::span<const ItemIndex> excluded = {});

/// Highest-m candidates. Returns fewer than m if the candidate pool is
/// smaller (and reports that through `short_list` when given).
ScoredList top_m(const Recommender& model, UserIndex u, std::size_t m = kBaseListSize,
                 std::span<const ItemIndex> excluded = {}, bool* short_list = nullptr);

/// Ranks (score desc, index asc) and truncates; shared by top_m and tests.
std::vector<std::pair<ItemIndex, double>> rank_candidates(std::span<const ItemIndex> candidates,
                                                          std::span<const double> scores,
                                                          std::size_t m);

/// Min-max normalisation in place. A constant vector maps to 1 when its
/// value is positive and to 0 otherwise.
void min_max_normalize(std::span<double> values);

}  // namespace poicalib
