#pragma once

#include <memory>
#include <span>
#include <vector>

#include "poicalib/geo.hpp"
#include "poicalib/ingest.hpp"
#include "poicalib/vocabulary.hpp"

namespace poicalib {

/// Dense view of a training split shared by all recommenders.
///
/// The item catalogue is exactly the set of train items; only these can be
/// recommended.
struct TrainData {
  Vocabulary users;
  Vocabulary items;
  std::vector<std::vector<ItemIndex>> sequences;  // per user, time ordered
  std::vector<std::vector<ItemIndex>> seen;       // per user, sorted unique
  std::vector<GeoPoint> item_coords;
  std::size_t n_interactions = 0;

  static std::shared_ptr<const TrainData> from_log(const InteractionLog& train);

  bool has_seen(UserIndex u, ItemIndex i) const;

  /// Maps another split's per-user items into catalogue indices, dropping
  /// items the catalogue does not know. Users unknown to train are ignored.
  std::vector<std::vector<ItemIndex>> project(const InteractionLog& other) const;
};

}  // namespace poicalib
