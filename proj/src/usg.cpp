#include "poicalib/usg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "poicalib/error.hpp"

namespace poicalib {
namespace {

constexpr double kMinProbability = 1e-12;

std::size_t overlap(const std::vector<ItemIndex>& a, const std::vector<ItemIndex>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else ++n, ++i, ++j;
  }
  return n;
}

// Builds item -> users postings (users ascending).
std::vector<std::vector<UserIndex>> postings(const TrainData& data) {
  std::vector<std::vector<UserIndex>> by_item(data.items.size());
  for (UserIndex u = 0; u < data.users.size(); ++u)
    for (auto i : data.seen[u]) by_item[i].push_back(u);
  return by_item;
}

std::vector<Neighbor> neighbors_of(const TrainData& data,
                                   const std::vector<std::vector<UserIndex>>& by_item,
                                   UserIndex u, std::size_t k, std::vector<std::uint32_t>& counts,
                                   std::vector<UserIndex>& touched) {
  for (auto i : data.seen[u])
    for (auto v : by_item[i]) {
      if (v == u) continue;
      if (counts[v]++ == 0) touched.push_back(v);
    }
  std::vector<Neighbor> out;
  out.reserve(touched.size());
  const double nu = static_cast<double>(data.seen[u].size());
  for (auto v : touched) {
    const double nv = static_cast<double>(data.seen[v].size());
    out.push_back({v, static_cast<double>(counts[v]) / std::sqrt(nu * nv)});
    counts[v] = 0;
  }
  touched.clear();
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.user < b.user;
  };
  const std::size_t keep = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(),
                    better);
  out.resize(keep);
  return out;
}

}  // namespace

double PowerLaw::log_probability(double distance_km) const {
  const double d = std::max(distance_km, min_distance_km);
  const double log_p = std::log(a) + b * std::log(d);
  return std::max(log_p, std::log(kMinProbability));
}

PowerLaw fit_power_law(std::span<const double> distances_km, std::size_t bins) {
  PowerLaw law;
  std::vector<double> d;
  d.reserve(distances_km.size());
  for (double x : distances_km)
    if (x > 0.0 && std::isfinite(x)) d.push_back(x);
  if (d.size() < 2 || bins == 0) return law;
  const auto [lo_it, hi_it] = std::minmax_element(d.begin(), d.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return law;

  const double log_lo = std::log(lo), log_hi = std::log(hi);
  const double step = (log_hi - log_lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : d) {
    auto k = static_cast<std::size_t>((std::log(x) - log_lo) / step);
    ++counts[std::min(k, bins - 1)];
  }
  const double total = static_cast<double>(d.size());
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < bins; ++k) {
    if (counts[k] == 0) continue;
    const double left = std::exp(log_lo + step * static_cast<double>(k));
    const double right = std::exp(log_lo + step * static_cast<double>(k + 1));
    const double density = static_cast<double>(counts[k]) / (total * (right - left));
    xs.push_back(0.5 * (std::log(left) + std::log(right)));
    ys.push_back(std::log(density));
  }
  if (xs.size() < 2) return law;
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  law.b = sxy / sxx;
  law.a = std::exp(my - law.b * mx);
  law.min_distance_km = lo;
  law.enabled = true;
  return law;
}

std::vector<double> within_user_distances(const TrainData& data) {
  std::vector<double> out;
  for (const auto& items : data.seen)
    for (std::size_t x = 0; x < items.size(); ++x)
      for (std::size_t y = x + 1; y < items.size(); ++y)
        out.push_back(haversine_km(data.item_coords[items[x]], data.item_coords[items[y]]));
  return out;
}

double cosine_similarity(const TrainData& data, UserIndex u, UserIndex v) {
  const auto& a = data.seen[u];
  const auto& b = data.seen[v];
  if (a.empty() || b.empty()) return 0.0;
  return static_cast<double>(overlap(a, b)) /
         std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

NeighborLists cosine_neighbors(const TrainData& data, std::size_t k) {
  const auto by_item = postings(data);
  NeighborLists out(data.users.size());
  const auto n = static_cast<std::ptrdiff_t>(data.users.size());
#pragma omp parallel
  {
    std::vector<std::uint32_t> counts(data.users.size(), 0);
    std::vector<UserIndex> touched;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t u = 0; u < n; ++u)
      out[u] = neighbors_of(data, by_item, static_cast<UserIndex>(u), k, counts, touched);
  }
  return out;
}

namespace serial {
NeighborLists cosine_neighbors(const TrainData& data, std::size_t k) {
  // Brute force over all pairs; independent of the postings-based kernel.
  NeighborLists out(data.users.size());
  for (UserIndex u = 0; u < data.users.size(); ++u) {
    std::vector<Neighbor> all;
    for (UserIndex v = 0; v < data.users.size(); ++v) {
      if (v == u) continue;
      const double s = cosine_similarity(data, u, v);
      if (s > 0.0) all.push_back({v, s});
    }
    std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.similarity > b.similarity;
    });
    if (all.size() > k) all.resize(k);
    out[u] = std::move(all);
  }
  return out;
}
}  // namespace serial

UsgModel::UsgModel(std::shared_ptr<const TrainData> data, UsgConfig config, PowerLaw geo)
    : Recommender(std::move(data)), config_(config), geo_(geo) {
  if (config_.alpha != 0.0)
    throw config_error("train", "USG social weight alpha must be 0: no social graph is used");
  if (!(config_.beta >= 0.0 && config_.beta <= 1.0))
    throw config_error("train", "USG beta must lie in [0, 1]");
  neighbors_ = cosine_neighbors(this->data(), config_.neighbors);
}

UsgModel UsgModel::fit(std::shared_ptr<const TrainData> data, const UsgConfig& config) {
  auto law = fit_power_law(within_user_distances(*data), config.histogram_bins);
  if (!law.enabled && config.beta > 0.0)
    std::cerr << "warning: fewer than 2 distinct check-in distances; USG geographical "
                 "component disabled\n";
  return UsgModel(std::move(data), config, law);
}

double UsgModel::collaborative(UserIndex u, ItemIndex l) const {
  double num = 0.0, den = 0.0;
  for (const auto& nb : neighbors_[u]) {
    den += nb.similarity;
    if (data().has_seen(nb.user, l)) num += nb.similarity;
  }
  return den > 0.0 ? num / den : 0.0;
}

double UsgModel::geo_log_likelihood(UserIndex u, ItemIndex l) const {
  const auto& coords = data().item_coords;
  double sum = 0.0;
  for (auto visited : data().seen[u])
    sum += geo_.log_probability(haversine_km(coords[l], coords[visited]));
  return sum;
}

void UsgModel::score(UserIndex u, std::span<const ItemIndex> candidates,
                     std::span<double> out) const {
  const double beta = effective_beta();
  const std::size_t n = candidates.size();
  std::vector<double> cf(n, 0.0), geo(n, 0.0);

  if (beta < 1.0) {
    std::vector<double> acc(data().items.size(), 0.0);
    double den = 0.0;
    for (const auto& nb : neighbors_[u]) {
      den += nb.similarity;
      for (auto i : data().seen[nb.user]) acc[i] += nb.similarity;
    }
    for (std::size_t c = 0; c < n; ++c) cf[c] = den > 0.0 ? acc[candidates[c]] / den : 0.0;
    min_max_normalize(cf);
  }
  if (beta > 0.0) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      geo[c] = geo_log_likelihood(u, candidates[c]);
      best = std::max(best, geo[c]);
    }
    // exp(log g - max) rescales g by a constant, which min-max removes.
    for (auto& g : geo) g = std::exp(g - best);
    min_max_normalize(geo);
  }
  for (std::size_t c = 0; c < n; ++c) out[c] = (1.0 - beta) * cf[c] + beta * geo[c];
}

double UsgModel::score(std::string_view user_id, std::string_view item_id) const {
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
