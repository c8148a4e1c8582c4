#include "poicalib/recommender.hpp"

#include <algorithm>
#include <numeric>

namespace poicalib {

std::vector<std::string> ScoredList::item_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.item_id);
  return ids;
}

std::vector<ItemIndex> candidate_items(const TrainData& data, UserIndex u,
                                       std::span<const ItemIndex> excluded) {
  std::vector<ItemIndex> out;
  out.reserve(data.items.size());
  const auto& seen = data.seen[u];
  auto s = seen.begin();
  auto e = excluded.begin();
  for (ItemIndex i = 0; i < data.items.size(); ++i) {
    while (s != seen.end() && *s < i) ++s;
    while (e != excluded.end() && *e < i) ++e;
    if ((s != seen.end() && *s == i) || (e != excluded.end() && *e == i)) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::pair<ItemIndex, double>> rank_candidates(std::span<const ItemIndex> candidates,
                                                          std::span<const double> scores,
                                                          std::size_t m) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  };
  const std::size_t keep = std::min(m, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    better);
  std::vector<std::pair<ItemIndex, double>> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) out.emplace_back(candidates[order[r]], scores[order[r]]);
  return out;
}

ScoredList top_m(const Recommender& model, UserIndex u, std::size_t m,
                 std::span<const ItemIndex> excluded, bool* short_list) {
  const auto& data = model.data();
  auto candidates = candidate_items(data, u, excluded);
  std::vector<double> scores(candidates.size());
  if (!candidates.empty()) model.score(u, candidates, scores);
  if (short_list) *short_list = candidates.size() < m;

  ScoredList list;
  list.user_id = data.users.id(u);
  list.origin = std::string(model.tag());
  for (auto [item, score] : rank_candidates(candidates, scores, m))
    list.entries.push_back({data.items.id(item), score});
  return list;
}

void min_max_normalize(std::span<double> values) {
  if (values.empty()) return;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo, max = *hi;
  if (max > min) {
    for (auto& v : values) v = (v - min) / (max - min);
  } else {
    std::fill(values.begin(), values.end(), max > 0.0 ? 1.0 : 0.0);
  }
}

}  // namespace poicalib
