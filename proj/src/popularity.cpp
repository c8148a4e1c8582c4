#include "poicalib/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "poicalib/error.hpp"

namespace poicalib {

std::string_view to_string(ItemClass c) {
  switch (c) {
    case ItemClass::head: return "H";
    case ItemClass::mid: return "M";
    case ItemClass::tail: return "T";
  }
  return "?";
}

std::string_view to_string(UserGroup g) {
  switch (g) {
    case UserGroup::low_pop: return "LowPop";
    case UserGroup::med_pop: return "MedPop";
    case UserGroup::high_pop: return "HighPop";
  }
  return "?";
}

UserGroup parse_user_group(std::string_view name) {
  for (auto g : kUserGroups)
    if (to_string(g) == name) return g;
  throw data_error("", "unknown user group '" + std::string(name) + "'");
}

PopularityDistribution PopularityDistribution::from_counts(std::size_t h, std::size_t m,
                                                           std::size_t t) {
  const double total = static_cast<double>(h + m + t);
  if (total == 0) throw data_error("", "distribution of an empty list");
  return {static_cast<double>(h) / total, static_cast<double>(m) / total,
          static_cast<double>(t) / total};
}

PopularityIndex PopularityIndex::build(const InteractionLog& train) {
  if (train.empty()) throw data_error("popularity", "empty training split");
  PopularityIndex index;
  std::vector<std::string> item_ids;
  for (const auto& [id, _] : train.item_coords()) item_ids.push_back(id);
  index.items_ = Vocabulary(std::move(item_ids));
  index.users_ = Vocabulary(train.user_ids());

  const std::size_t n_items = index.items_.size();
  const std::size_t n_users = index.users_.size();
  auto runs = train.by_user();

  // Distinct visitors per item; runs may still hold repeat visits.
  std::vector<std::size_t> visitors(n_items, 0);
  std::vector<std::vector<ItemIndex>> profiles(n_users);
  for (std::size_t u = 0; u < runs.size(); ++u) {
    auto& profile = profiles[u];
    for (const auto& x : runs[u]) profile.push_back(index.items_.at(x.item_id));
    std::sort(profile.begin(), profile.end());
    profile.erase(std::unique(profile.begin(), profile.end()), profile.end());
    for (auto i : profile) ++visitors[i];
  }
  index.item_pop_.resize(n_items);
  for (std::size_t i = 0; i < n_items; ++i)
    index.item_pop_[i] = static_cast<double>(visitors[i]) / static_cast<double>(n_users);

  std::vector<ItemIndex> item_order(n_items);
  std::iota(item_order.begin(), item_order.end(), 0);
  std::sort(item_order.begin(), item_order.end(), [&](ItemIndex a, ItemIndex b) {
    if (index.item_pop_[a] != index.item_pop_[b]) return index.item_pop_[a] > index.item_pop_[b];
    return a < b;
  });
  const std::size_t n_head = n_items / 5;
  index.item_class_.assign(n_items, ItemClass::mid);
  for (std::size_t r = 0; r < n_head; ++r) index.item_class_[item_order[r]] = ItemClass::head;
  for (std::size_t r = n_items - n_head; r < n_items; ++r)
    index.item_class_[item_order[r]] = ItemClass::tail;
  if (n_head > 0) {
    index.head_cut_ = index.item_pop_[item_order[n_head - 1]];
    index.tail_cut_ = index.item_pop_[item_order[n_items - n_head]];
  }

  index.user_pop_.resize(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    double sum = 0.0;
    for (auto i : profiles[u]) sum += index.item_pop_[i];
    index.user_pop_[u] = sum / static_cast<double>(profiles[u].size());
  }
  std::vector<UserIndex> user_order(n_users);
  std::iota(user_order.begin(), user_order.end(), 0);
  std::sort(user_order.begin(), user_order.end(), [&](UserIndex a, UserIndex b) {
    if (index.user_pop_[a] != index.user_pop_[b]) return index.user_pop_[a] < index.user_pop_[b];
    return a < b;
  });
  const std::size_t n_edge = n_users / 5;
  index.user_group_.assign(n_users, UserGroup::med_pop);
  for (std::size_t r = 0; r < n_edge; ++r) index.user_group_[user_order[r]] = UserGroup::low_pop;
  for (std::size_t r = n_users - n_edge; r < n_users; ++r)
    index.user_group_[user_order[r]] = UserGroup::high_pop;
  if (n_edge > 0) {
    index.low_cut_ = index.user_pop_[user_order[n_edge - 1]];
    index.high_cut_ = index.user_pop_[user_order[n_users - n_edge]];
  }
  return index;
}

std::string PopularityIndex::to_json() const {
  nlohmann::ordered_json doc;
  doc["n_items"] = items_.size();
  doc["n_users"] = users_.size();
  doc["item_cuts"] = {{"head_min_pop", head_cut_}, {"tail_max_pop", tail_cut_}};
  doc["user_cuts"] = {{"low_pop_max_profile_pop", low_cut_},
                      {"high_pop_min_profile_pop", high_cut_}};
  auto& items = doc["items"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < items_.size(); ++i)
    items.push_back({{"item_id", items_.id(i)},
                     {"pop", item_pop_[i]},
                     {"class", std::string(to_string(item_class_[i]))}});
  auto& users = doc["users"] = nlohmann::ordered_json::array();
  for (std::size_t u = 0; u < users_.size(); ++u)
    users.push_back({{"user_id", users_.id(u)},
                     {"profile_pop", user_pop_[u]},
                     {"group", std::string(to_string(user_group_[u]))}});
  return doc.dump(1) + "\n";
}

PopularityDistribution profile_distribution(std::string_view user_id, const InteractionLog& train,
                                            const PopularityIndex& index) {
  index.users().at(user_id, "user");
  std::array<std::size_t, 3> counts{};
  std::vector<std::string_view> seen;
  for (const auto& x : train.interactions()) {
    if (x.user_id != user_id) continue;
    if (std::find(seen.begin(), seen.end(), x.item_id) != seen.end()) continue;
    seen.push_back(x.item_id);
    ++counts[static_cast<std::size_t>(index.item_class(x.item_id))];
  }
  return PopularityDistribution::from_counts(counts[0], counts[1], counts[2]);
}

std::vector<PopularityDistribution> profile_distributions(const InteractionLog& train,
                                                          const PopularityIndex& index) {
  std::vector<PopularityDistribution> out(index.users().size());
  for (auto run : train.by_user()) {
    std::array<std::size_t, 3> counts{};
    std::vector<ItemIndex> items;
    for (const auto& x : run) items.push_back(index.items().at(x.item_id));
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    for (auto i : items) ++counts[static_cast<std::size_t>(index.item_classes()[i])];
    out[index.users().at(run.front().user_id)] =
        PopularityDistribution::from_counts(counts[0], counts[1], counts[2]);
  }
  return out;
}

}  // namespace poicalib
