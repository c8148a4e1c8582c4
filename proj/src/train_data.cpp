#include "poicalib/train_data.hpp"

#include <algorithm>

#include "poicalib/error.hpp"

namespace poicalib {

std::shared_ptr<const TrainData> TrainData::from_log(const InteractionLog& train) {
  if (train.empty()) throw data_error("train", "empty training split");
  auto data = std::make_shared<TrainData>();
  std::vector<std::string> item_ids;
  for (const auto& [id, _] : train.item_coords()) item_ids.push_back(id);
  data->items = Vocabulary(std::move(item_ids));
  data->users = Vocabulary(train.user_ids());
  data->item_coords.resize(data->items.size());
  for (const auto& [id, p] : train.item_coords()) data->item_coords[data->items.at(id)] = p;

  data->sequences.resize(data->users.size());
  data->seen.resize(data->users.size());
  for (auto run : train.by_user()) {
    const auto u = data->users.at(run.front().user_id);
    auto& seq = data->sequences[u];
    for (const auto& x : run) seq.push_back(data->items.at(x.item_id));
    auto& s = data->seen[u];
    s = seq;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  data->n_interactions = train.size();
  return data;
}

bool TrainData::has_seen(UserIndex u, ItemIndex i) const {
  const auto& s = seen[u];
  return std::binary_search(s.begin(), s.end(), i);
}

std::vector<std::vector<ItemIndex>> TrainData::project(const InteractionLog& other) const {
  std::vector<std::vector<ItemIndex>> out(users.size());
  for (const auto& x : other.interactions()) {
    auto u = users.find(x.user_id);
    auto i = items.find(x.item_id);
    if (u && i) out[*u].push_back(*i);
  }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

}  // namespace poicalib
