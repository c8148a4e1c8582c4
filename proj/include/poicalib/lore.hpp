#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "poicalib/recommender.hpp"

namespace poicalib {

struct LoreConfig {
  /// Weight ratio between consecutive history positions (older / newer).
  double decay = 0.5;
  double min_bandwidth_deg = 1e-4;
  /// Lower bound of the normalised geographical factor.
  double geo_floor = 1e-6;
};

/// Row-stochastic location-location transition matrix in CSR form.
class TransitionGraph {
 public:
  TransitionGraph() = default;
  /// Counts consecutive (a, b) pairs over every sequence, then row-normalises.
  static TransitionGraph from_sequences(std::size_t n_items,
                                        const std::vector<std::vector<ItemIndex>>& sequences);

  std::size_t size() const noexcept { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  double probability(ItemIndex from, ItemIndex to) const;
  std::span<const ItemIndex> targets(ItemIndex from) const;
  std::span<const double> probabilities(ItemIndex from) const;

 private:
  std::vector<std::size_t> row_start_;
  std::vector<ItemIndex> targets_;
  std::vector<double> probs_;
};

/// Normalised additive-Markov-chain weights for a history of length n:
/// w_k proportional to decay^(n-k), k = 1..n; with decay 1/2 this is
/// 2^(k-n-1) / (1 - 2^-n).
std::vector<double> amc_weights(std::size_t n, double decay = 0.5);

/// Product-kernel Gaussian KDE over a user's visited (lat, lon) in degrees,
/// Scott's-rule bandwidth sigma * n^(-1/6) per axis, floored.
class GeoDensity {
 public:
  GeoDensity() = default;
  GeoDensity(std::vector<GeoPoint> points, double min_bandwidth_deg);

  double operator()(const GeoPoint& p) const;
  double bandwidth_lat() const noexcept { return h_lat_; }
  double bandwidth_lon() const noexcept { return h_lon_; }

 private:
  std::vector<GeoPoint> points_;
  double h_lat_ = 0.0, h_lon_ = 0.0;
};

/// Sequential recommender: seq(u, l) * geo(u, l) where
///   seq(u, l) = sum_k w_k T(s_k, l) over the user's train sequence s_1..s_n
///   geo(u, l) = max(floor, min-max normalised KDE density at l)
class LoreModel final : public Recommender {
 public:
  LoreModel(std::shared_ptr<const TrainData> data, LoreConfig config);

  static LoreModel fit(std::shared_ptr<const TrainData> data, const LoreConfig& config = {}) {
    return LoreModel(std::move(data), config);
  }

  std::string_view tag() const override { return "lore"; }
  void score(UserIndex u, std::span<const ItemIndex> candidates,
             std::span<double> out) const override;
  double score(std::string_view user_id, std::string_view item_id) const;

  double sequential(UserIndex u, ItemIndex l) const;
  double density(UserIndex u, ItemIndex l) const;

  const LoreConfig& config() const noexcept { return config_; }
  const TransitionGraph& transitions() const noexcept { return graph_; }
  const GeoDensity& user_density(UserIndex u) const { return densities_.at(u); }

 private:
  LoreConfig config_;
  TransitionGraph graph_;
  std::vector<GeoDensity> densities_;
};

}  // namespace poicalib
