#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "poicalib/recommender.hpp"

namespace poicalib {

struct BprConfig {
  std::size_t dim = 64;
  double learning_rate = 0.05;
  double regularization = 0.01;
  std::size_t batch_size = 256;
  std::size_t epochs = 200;
  double init_std = 0.01;
  /// Evaluate the full pairwise objective every this many epochs (0 = never).
  std::size_t objective_every = 20;
};

/// Row-major dense matrix of latent factors.
class FactorMatrix {
 public:
  FactorMatrix() = default;
  FactorMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const FactorMatrix&, const FactorMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Bayesian personalised ranking matrix factorisation, no bias terms.
///
/// Training is mini-batch stochastic gradient ascent on
///   sum ln sigmoid(<w_u, h_i> - <w_u, h_j>) - reg/2 (|w_u|^2 + |h_i|^2 + |h_j|^2)
/// over (u, i, j) triples: each epoch visits every train interaction (u, i)
/// once in a seeded random order and draws j uniformly from u's unseen
/// items. Gradients within a batch are taken at the batch-start parameters
/// and applied together.
class BprModel final : public Recommender {
 public:
  BprModel(std::shared_ptr<const TrainData> data, BprConfig config, FactorMatrix users,
           FactorMatrix items);

  /// Throws a training error if any factor becomes non-finite.
  static BprModel fit(std::shared_ptr<const TrainData> data, const BprConfig& config,
                      std::uint64_t seed);

  std::string_view tag() const override { return "bpr"; }
  void score(UserIndex u, std::span<const ItemIndex> candidates,
             std::span<double> out) const override;

  double score(UserIndex u, ItemIndex i) const { return dot(users_.row(u), items_.row(i)); }
  double score(std::string_view user_id, std::string_view item_id) const;

  const BprConfig& config() const noexcept { return config_; }
  const FactorMatrix& user_factors() const noexcept { return users_; }
  const FactorMatrix& item_factors() const noexcept { return items_; }

  /// (epoch, objective) pairs recorded during fit.
  const std::vector<std::pair<std::size_t, double>>& objective_trace() const noexcept {
    return trace_;
  }

 private:
  BprConfig config_;
  FactorMatrix users_;
  FactorMatrix items_;
  std::vector<std::pair<std::size_t, double>> trace_;
};

/// Mean over all (u, i in train(u), j unseen by u) of
/// ln sigmoid(x_uij) - reg/2 (|w_u|^2 + |h_i|^2 + |h_j|^2): the expectation of
/// the per-step quantity SGD climbs. OpenMP over users, ordered reduction.
double bpr_objective(const TrainData& data, const FactorMatrix& users, const FactorMatrix& items,
                     double regularization);

namespace serial {
double bpr_objective(const TrainData& data, const FactorMatrix& users, const FactorMatrix& items,
                     double regularization);
}  // namespace serial

}  // namespace poicalib
