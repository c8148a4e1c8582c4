#include "poicalib/bpr.hpp"

#include <cmath>
#include <string>

#include "poicalib/error.hpp"
#include "poicalib/rng.hpp"

namespace poicalib {
namespace {

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sq_norm(std::span<const double> v) { return dot(v, v); }

// Sum over u's (i, j) pairs, normalised per i; also returns how many i counted.
std::pair<double, std::size_t> user_objective(const TrainData& data, const FactorMatrix& users,
                                              const FactorMatrix& items, double reg,
                                              UserIndex u, std::vector<double>& scores,
                                              const std::vector<double>& norms) {
  const std::size_t n_items = data.items.size();
  const auto& seen = data.seen[u];
  if (seen.size() >= n_items || seen.empty()) return {0.0, 0};
  const auto wu = users.row(u);
  for (ItemIndex k = 0; k < n_items; ++k) scores[k] = dot(wu, items.row(k));
  const double unseen_count = static_cast<double>(n_items - seen.size());
  double unseen_norm = 0.0;
  for (ItemIndex k = 0; k < n_items; ++k)
    if (!data.has_seen(u, k)) unseen_norm += norms[k];
  const double wu_norm = sq_norm(wu);

  double total = 0.0;
  for (auto i : data.sequences[u]) {
    double acc = 0.0;
    auto s = seen.begin();
    for (ItemIndex j = 0; j < n_items; ++j) {
      while (s != seen.end() && *s < j) ++s;
      if (s != seen.end() && *s == j) continue;
      acc += log_sigmoid(scores[i] - scores[j]);
    }
    total += acc / unseen_count -
             0.5 * reg * (wu_norm + norms[i] + unseen_norm / unseen_count);
  }
  return {total, data.sequences[u].size()};
}

std::vector<double> item_norms(const FactorMatrix& items) {
  std::vector<double> norms(items.rows());
  for (std::size_t k = 0; k < items.rows(); ++k) norms[k] = sq_norm(items.row(k));
  return norms;
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

BprModel::BprModel(std::shared_ptr<const TrainData> data, BprConfig config, FactorMatrix users,
                   FactorMatrix items)
    : Recommender(std::move(data)),
      config_(config),
      users_(std::move(users)),
      items_(std::move(items)) {
  if (users_.rows() != this->data().users.size() || items_.rows() != this->data().items.size() ||
      users_.cols() != items_.cols())
    throw data_error("train", "BPR factor shapes do not match the training data");
}

BprModel BprModel::fit(std::shared_ptr<const TrainData> data, const BprConfig& config,
                       std::uint64_t seed) {
  if (config.dim == 0 || config.batch_size == 0)
    throw config_error("train", "BPR dim and batch_size must be positive");
  const std::size_t n_users = data->users.size();
  const std::size_t n_items = data->items.size();
  const std::size_t d = config.dim;

  Rng rng(seed);
  FactorMatrix W(n_users, d), H(n_items, d);
  for (auto& x : W.values()) x = rng.normal(0.0, config.init_std);
  for (auto& x : H.values()) x = rng.normal(0.0, config.init_std);

  std::vector<std::pair<UserIndex, ItemIndex>> pairs;
  pairs.reserve(data->n_interactions);
  for (UserIndex u = 0; u < n_users; ++u)
    for (auto i : data->sequences[u]) pairs.emplace_back(u, i);

  BprModel model(data, config, std::move(W), std::move(H));
  auto& users = model.users_;
  auto& items = model.items_;

  auto record = [&](std::size_t epoch) {
    if (config.objective_every == 0) return;
    model.trace_.emplace_back(epoch,
                              bpr_objective(*data, users, items, config.regularization));
  };
  record(0);

  FactorMatrix dW(n_users, d), dH(n_items, d);
  std::vector<char> user_touched(n_users, 0), item_touched(n_items, 0);
  std::vector<UserIndex> touched_users;
  std::vector<ItemIndex> touched_items;
  const double lr = config.learning_rate;
  const double reg = config.regularization;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(pairs, rng);
    for (std::size_t start = 0; start < pairs.size(); start += config.batch_size) {
      const std::size_t end = std::min(pairs.size(), start + config.batch_size);
      for (std::size_t t = start; t < end; ++t) {
        const auto [u, i] = pairs[t];
        if (data->seen[u].size() >= n_items) continue;
        ItemIndex j = static_cast<ItemIndex>(rng.below(n_items));
        while (data->has_seen(u, j)) j = static_cast<ItemIndex>(rng.below(n_items));

        const auto wu = users.row(u);
        const auto hi = items.row(i);
        const auto hj = items.row(j);
        double x = 0.0;
        for (std::size_t k = 0; k < d; ++k) x += wu[k] * (hi[k] - hj[k]);
        const double g = 1.0 / (1.0 + std::exp(x));  // sigmoid(-x)

        auto gu = dW.row(u);
        auto gi = dH.row(i);
        auto gj = dH.row(j);
        for (std::size_t k = 0; k < d; ++k) {
          gu[k] += lr * (g * (hi[k] - hj[k]) - reg * wu[k]);
          gi[k] += lr * (g * wu[k] - reg * hi[k]);
          gj[k] += lr * (-g * wu[k] - reg * hj[k]);
        }
        if (!user_touched[u]) user_touched[u] = 1, touched_users.push_back(u);
        if (!item_touched[i]) item_touched[i] = 1, touched_items.push_back(i);
        if (!item_touched[j]) item_touched[j] = 1, touched_items.push_back(j);
      }
      for (auto u : touched_users) {
        auto row = users.row(u);
        auto delta = dW.row(u);
        for (std::size_t k = 0; k < d; ++k) row[k] += delta[k], delta[k] = 0.0;
        user_touched[u] = 0;
      }
      for (auto i : touched_items) {
        auto row = items.row(i);
        auto delta = dH.row(i);
        for (std::size_t k = 0; k < d; ++k) row[k] += delta[k], delta[k] = 0.0;
        item_touched[i] = 0;
      }
      touched_users.clear();
      touched_items.clear();
    }
    if (!all_finite(users.values()) || !all_finite(items.values()))
      throw training_error("train", "BPR diverged at epoch " + std::to_string(epoch) +
                                        " (lr=" + std::to_string(lr) +
                                        ", dim=" + std::to_string(d) +
                                        ", batch=" + std::to_string(config.batch_size) + ")");
    if (config.objective_every != 0 && epoch % config.objective_every == 0) record(epoch);
  }
  return model;
}

void BprModel::score(UserIndex u, std::span<const ItemIndex> candidates,
                     std::span<double> out) const {
  const auto wu = users_.row(u);
  for (std::size_t c = 0; c < candidates.size(); ++c) out[c] = dot(wu, items_.row(candidates[c]));
}

double BprModel::score(std::string_view user_id, std::string_view item_id) const {
  return score(data().users.at(user_id, "user"), data().items.at(item_id, "item"));
}

double bpr_objective(const TrainData& data, const FactorMatrix& users, const FactorMatrix& items,
                     double regularization) {
  const auto norms = item_norms(items);
  const auto n_users = static_cast<std::ptrdiff_t>(data.users.size());
  std::vector<double> per_user(data.users.size(), 0.0);
  std::vector<std::size_t> counts(data.users.size(), 0);
#pragma omp parallel
  {
    std::vector<double> scores(data.items.size());
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t u = 0; u < n_users; ++u) {
      auto [sum, n] = user_objective(data, users, items, regularization,
                                     static_cast<UserIndex>(u), scores, norms);
      per_user[u] = sum;
      counts[u] = n;
    }
  }
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t u = 0; u < per_user.size(); ++u) total += per_user[u], n += counts[u];
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

namespace serial {
double bpr_objective(const TrainData& data, const FactorMatrix& users, const FactorMatrix& items,
                     double regularization) {
  const auto norms = item_norms(items);
  std::vector<double> scores(data.items.size());
  double total = 0.0;
  std::size_t n = 0;
  for (UserIndex u = 0; u < data.users.size(); ++u) {
    auto [sum, count] = user_objective(data, users, items, regularization, u, scores, norms);
    total += sum;
    n += count;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}
}  // namespace serial

}  // namespace poicalib
