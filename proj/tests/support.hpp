#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "poicalib/ingest.hpp"
#include "poicalib/synthetic.hpp"

namespace testing {

struct Row {
  std::string user, item;
  std::int64_t ts;
  double lat = 40.0, lon = -74.0;
};

inline poicalib::InteractionLog make_log(const std::vector<Row>& rows) {
  std::vector<poicalib::Interaction> out;
  for (const auto& r : rows) out.push_back({r.user, r.item, r.ts, r.lat, r.lon});
  return poicalib::InteractionLog::from_rows(std::move(out));
}

/// Small synthetic log whose shape varies with the seed.
inline poicalib::InteractionLog random_log(std::uint64_t seed, std::size_t users = 40,
                                           std::size_t items = 120) {
  poicalib::SyntheticConfig c;
  c.users = users;
  c.items = items;
  c.seed = seed;
  c.clusters = 2 + seed % 5;
  c.min_checkins = 2;
  c.max_checkins = 25;
  c.zipf_exponent = 0.6 + 0.1 * static_cast<double>(seed % 8);
  return poicalib::generate_synthetic(c);
}

}  // namespace testing
