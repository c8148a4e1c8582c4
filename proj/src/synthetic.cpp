#include "poicalib/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "poicalib/error.hpp"
#include "poicalib/rng.hpp"

namespace poicalib {
namespace {

std::string make_id(const char* prefix, std::size_t k, std::size_t total) {
  const int width = static_cast<int>(std::to_string(total).size());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, k);
  return buf;
}

std::size_t draw_cumulative(const std::vector<double>& cumulative, Rng& rng) {
  const double x = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

InteractionLog generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.users == 0 || cfg.items == 0 || cfg.clusters == 0 || cfg.min_checkins == 0 ||
      cfg.max_checkins < cfg.min_checkins)
    throw config_error("synthetic", "invalid synthetic dataset parameters");
  Rng rng(cfg.seed);

  std::vector<GeoPoint> centers(cfg.clusters);
  for (auto& c : centers)
    c = {cfg.center_lat + rng.normal(0.0, cfg.city_spread_deg),
         cfg.center_lon + rng.normal(0.0, cfg.city_spread_deg)};

  std::vector<std::string> item_ids(cfg.items);
  std::vector<GeoPoint> coords(cfg.items);
  std::vector<std::size_t> cluster_of(cfg.items);
  std::vector<std::vector<std::size_t>> members(cfg.clusters);
  for (std::size_t i = 0; i < cfg.items; ++i) {
    item_ids[i] = make_id("poi", i, cfg.items);
    cluster_of[i] = i % cfg.clusters;
    members[cluster_of[i]].push_back(i);
    const auto& c = centers[cluster_of[i]];
    coords[i] = {std::clamp(c.lat + rng.normal(0.0, cfg.cluster_spread_deg), -90.0, 90.0),
                 std::clamp(c.lon + rng.normal(0.0, cfg.cluster_spread_deg), -180.0, 180.0)};
  }

  std::vector<std::size_t> rank(cfg.items);
  for (std::size_t i = 0; i < cfg.items; ++i) rank[i] = i;
  shuffle(rank, rng);

  std::vector<std::size_t> successor(cfg.items);
  for (std::size_t i = 0; i < cfg.items; ++i) {
    const auto& same = members[cluster_of[i]];
    successor[i] = same[rng.below(same.size())];
  }

  std::vector<double> weight(cfg.items);
  for (std::size_t i = 0; i < cfg.items; ++i)
    weight[i] = 1.0 / std::pow(static_cast<double>(rank[i] + 1), cfg.zipf_exponent);

  std::vector<Interaction> rows;
  std::vector<double> global(cfg.items), local;
  for (std::size_t u = 0; u < cfg.users; ++u) {
    const std::string user_id = make_id("user", u, cfg.users);
    const std::size_t home = rng.below(cfg.clusters);
    const double mainstream = rng.uniform(cfg.min_mainstream, cfg.max_mainstream);
    const std::size_t target =
        cfg.min_checkins + rng.below(cfg.max_checkins - cfg.min_checkins + 1);

    // Item weights tilted by the user's taste: w^mainstream.
    double sum = 0.0;
    for (std::size_t i = 0; i < cfg.items; ++i) global[i] = sum += std::pow(weight[i], mainstream);
    const auto& home_items = members[home];
    local.resize(home_items.size());
    sum = 0.0;
    for (std::size_t k = 0; k < home_items.size(); ++k)
      local[k] = sum += std::pow(weight[home_items[k]], mainstream);

    std::int64_t t = 1262304000 + static_cast<std::int64_t>(rng.below(30 * 86400));
    std::unordered_set<std::size_t> visited;
    std::size_t prev = cfg.items;
    std::size_t attempts = 0;
    while (visited.size() < target && attempts < target * 50) {
      ++attempts;
      std::size_t item;
      if (prev < cfg.items && rng.uniform() < cfg.successor_probability)
        item = successor[prev];
      else if (rng.uniform() < cfg.local_probability)
        item = home_items[draw_cumulative(local, rng)];
      else
        item = draw_cumulative(global, rng);
      if (!visited.insert(item).second) continue;
      t += 600 + static_cast<std::int64_t>(rng.below(86400));
      rows.push_back({user_id, item_ids[item], t, coords[item].lat, coords[item].lon});
      prev = item;
    }
  }
  return InteractionLog::from_rows(std::move(rows));
}

}  // namespace poicalib
