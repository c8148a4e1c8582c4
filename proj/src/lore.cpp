#include "poicalib/lore.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "poicalib/error.hpp"

namespace poicalib {

TransitionGraph TransitionGraph::from_sequences(
    std::size_t n_items, const std::vector<std::vector<ItemIndex>>& sequences) {
  std::vector<std::map<ItemIndex, std::size_t>> counts(n_items);
  for (const auto& seq : sequences)
    for (std::size_t k = 1; k < seq.size(); ++k) ++counts[seq[k - 1]][seq[k]];

  TransitionGraph g;
  g.row_start_.reserve(n_items + 1);
  g.row_start_.push_back(0);
  for (const auto& row : counts) {
    std::size_t total = 0;
    for (const auto& [_, c] : row) total += c;
    for (const auto& [to, c] : row) {
      g.targets_.push_back(to);
      g.probs_.push_back(static_cast<double>(c) / static_cast<double>(total));
    }
    g.row_start_.push_back(g.targets_.size());
  }
  return g;
}

std::span<const ItemIndex> TransitionGraph::targets(ItemIndex from) const {
  return {targets_.data() + row_start_[from], row_start_[from + 1] - row_start_[from]};
}

std::span<const double> TransitionGraph::probabilities(ItemIndex from) const {
  return {probs_.data() + row_start_[from], row_start_[from + 1] - row_start_[from]};
}

double TransitionGraph::probability(ItemIndex from, ItemIndex to) const {
  auto t = targets(from);
  auto it = std::lower_bound(t.begin(), t.end(), to);
  if (it == t.end() || *it != to) return 0.0;
  return probabilities(from)[static_cast<std::size_t>(it - t.begin())];
}

std::vector<double> amc_weights(std::size_t n, double decay) {
  std::vector<double> w(n);
  if (n == 0) return w;
  // w_k = decay^(n-k), built from the most recent position backwards.
  double v = 1.0, total = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    w[k] = v;
    total += v;
    v *= decay;
  }
  for (auto& x : w) x /= total;
  return w;
}

GeoDensity::GeoDensity(std::vector<GeoPoint> points, double min_bandwidth_deg)
    : points_(std::move(points)) {
  const std::size_t n = points_.size();
  if (n == 0) throw data_error("train", "density over an empty point set");
  double sd_lat = 0.0, sd_lon = 0.0;
  if (n > 1) {
    double m_lat = 0.0, m_lon = 0.0;
    for (const auto& p : points_) m_lat += p.lat, m_lon += p.lon;
    m_lat /= static_cast<double>(n);
    m_lon /= static_cast<double>(n);
    for (const auto& p : points_) {
      sd_lat += (p.lat - m_lat) * (p.lat - m_lat);
      sd_lon += (p.lon - m_lon) * (p.lon - m_lon);
    }
    sd_lat = std::sqrt(sd_lat / static_cast<double>(n - 1));
    sd_lon = std::sqrt(sd_lon / static_cast<double>(n - 1));
  }
  const double scott = std::pow(static_cast<double>(n), -1.0 / 6.0);
  h_lat_ = std::max(sd_lat * scott, min_bandwidth_deg);
  h_lon_ = std::max(sd_lon * scott, min_bandwidth_deg);
}

double GeoDensity::operator()(const GeoPoint& p) const {
  double sum = 0.0;
  for (const auto& q : points_) {
    const double zl = (p.lat - q.lat) / h_lat_;
    const double zo = (p.lon - q.lon) / h_lon_;
    sum += std::exp(-0.5 * (zl * zl + zo * zo));
  }
  return sum / (static_cast<double>(points_.size()) * 2.0 * std::numbers::pi * h_lat_ * h_lon_);
}

LoreModel::LoreModel(std::shared_ptr<const TrainData> data, LoreConfig config)
    : Recommender(std::move(data)), config_(config) {
  if (!(config_.decay > 0.0)) throw config_error("train", "LORE decay must be positive");
  const auto& d = this->data();
  graph_ = TransitionGraph::from_sequences(d.items.size(), d.sequences);
  densities_.reserve(d.users.size());
  for (const auto& seq : d.sequences) {
    std::vector<GeoPoint> pts;
    pts.reserve(seq.size());
    for (auto i : seq) pts.push_back(d.item_coords[i]);
    densities_.emplace_back(std::move(pts), config_.min_bandwidth_deg);
  }
}

double LoreModel::sequential(UserIndex u, ItemIndex l) const {
  const auto& seq = data().sequences[u];
  const auto w = amc_weights(seq.size(), config_.decay);
  double s = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k) s += w[k] * graph_.probability(seq[k], l);
  return s;
}

double LoreModel::density(UserIndex u, ItemIndex l) const {
  return densities_[u](data().item_coords[l]);
}

void LoreModel::score(UserIndex u, std::span<const ItemIndex> candidates,
                      std::span<double> out) const {
  const auto& seq = data().sequences[u];
  const auto w = amc_weights(seq.size(), config_.decay);
  std::vector<double> seq_score(data().items.size(), 0.0);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    auto to = graph_.targets(seq[k]);
    auto p = graph_.probabilities(seq[k]);
    for (std::size_t e = 0; e < to.size(); ++e) seq_score[to[e]] += w[k] * p[e];
  }
  std::vector<double> geo(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) geo[c] = density(u, candidates[c]);
  min_max_normalize(geo);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    out[c] = seq_score[candidates[c]] * std::max(geo[c], config_.geo_floor);
}

double LoreModel::score(std::string_view user_id, std::string_view item_id) const {
  const auto u = data().users.at(user_id, "user");
  const auto l = data().items.at(item_id, "item");
  auto candidates = candidate_items(data(), u);
  if (!std::binary_search(candidates.begin(), candidates.end(), l))
    candidates.insert(std::lower_bound(candidates.begin(), candidates.end(), l), l);
  std::vector<double> scores(candidates.size());
  score(u, candidates, scores);
  return scores[static_cast<std::size_t>(
      std::lower_bound(candidates.begin(), candidates.end(), l) - candidates.begin())];
}

}  // namespace poicalib
