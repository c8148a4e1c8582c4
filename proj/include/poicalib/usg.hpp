#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "poicalib/recommender.hpp"

namespace poicalib {

struct UsgConfig {
  double beta = 0.1;   // weight of the geographical component
  double alpha = 0.0;  // social weight; only 0 is supported (no social graph)
  std::size_t neighbors = 50;
  std::size_t histogram_bins = 100;
};

/// Pr[d] = a * d^b, with distances below `min_distance_km` clamped to it.
struct PowerLaw {
  double a = 1.0;
  double b = 0.0;
  double min_distance_km = 0.0;
  bool enabled = false;

  double log_probability(double distance_km) const;
};

/// Least-squares fit of log density against log distance over a histogram of
/// `bins` log-spaced bins between the smallest and largest positive
/// distance; empty bins are skipped. Disabled (enabled == false) when fewer
/// than two distinct positive distances or two non-empty bins exist.
PowerLaw fit_power_law(std::span<const double> distances_km, std::size_t bins = 100);

/// Every pairwise distance between distinct items of the same user.
std::vector<double> within_user_distances(const TrainData& data);

struct Neighbor {
  UserIndex user = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};
using NeighborLists = std::vector<std::vector<Neighbor>>;

/// |I_u ∩ I_v| / sqrt(|I_u| |I_v|) over binary visit vectors.
double cosine_similarity(const TrainData& data, UserIndex u, UserIndex v);

/// Top-k most similar other users with positive similarity, ordered by
/// (similarity desc, user index asc). OpenMP over users.
NeighborLists cosine_neighbors(const TrainData& data, std::size_t k);

namespace serial {
NeighborLists cosine_neighbors(const TrainData& data, std::size_t k);
}  // namespace serial

/// User-based CF fused with a naive-Bayes power-law geographical model:
///   score = (1 - beta) * cf + beta * geo
/// with both components min-max normalised over the user's candidate set.
///   cf(u, l)  = sum_v sim(u,v) visited(v,l) / sum_v sim(u,v), v over the top-k neighbours
///   geo(u, l) = prod_{l' in L_u} max(Pr[dist(l, l')], 1e-12), evaluated in log space
class UsgModel final : public Recommender {
 public:
  UsgModel(std::shared_ptr<const TrainData> data, UsgConfig config, PowerLaw geo);

  /// Throws a config error when alpha != 0 or beta is outside [0, 1].
  static UsgModel fit(std::shared_ptr<const TrainData> data, const UsgConfig& config);

  std::string_view tag() const override { return "usg"; }
  void score(UserIndex u, std::span<const ItemIndex> candidates,
             std::span<double> out) const override;

  /// Score within the user's default candidate set (unseen items, plus
  /// `item_id` itself if the user has seen it).
  double score(std::string_view user_id, std::string_view item_id) const;

  /// Unnormalised components.
  double collaborative(UserIndex u, ItemIndex l) const;
  double geo_log_likelihood(UserIndex u, ItemIndex l) const;

  const UsgConfig& config() const noexcept { return config_; }
  const PowerLaw& power_law() const noexcept { return geo_; }
  const NeighborLists& neighbors() const noexcept { return neighbors_; }
  /// Effective geographical weight: beta, or 0 when the fit was disabled.
  double effective_beta() const noexcept { return geo_.enabled ? config_.beta : 0.0; }

 private:
  UsgConfig config_;
  PowerLaw geo_;
  NeighborLists neighbors_;
};

}  // namespace poicalib
