#pragma once

#include <cstdint>

#include "poicalib/ingest.hpp"

namespace poicalib {

/// Parameters of the synthetic check-in generator.
///
/// Items sit in 2-D Gaussian clusters around a city centre and carry Zipf
/// popularity weights over a random rank order. Each user has a home cluster
/// and a mainstream exponent m; a visit picks item i with weight w_i^m, from
/// the home cluster with probability local_probability and from the whole
/// catalogue otherwise. Low m flattens the draw into the long tail. A share
/// of moves follows a fixed per-item successor, giving the sequential
/// models something to learn.
struct SyntheticConfig {
  std::size_t users = 300;
  std::size_t items = 500;
  double zipf_exponent = 1.0;
  std::size_t clusters = 8;
  double cluster_spread_deg = 0.02;
  double city_spread_deg = 0.15;
  double center_lat = 40.73;
  double center_lon = -73.99;
  std::size_t min_checkins = 15;
  std::size_t max_checkins = 60;
  double successor_probability = 0.25;
  double local_probability = 0.5;
  double min_mainstream = 0.05;
  double max_mainstream = 0.95;
  std::uint64_t seed = 42;
};

/// Deduplicated log (one visit per user and item).
InteractionLog generate_synthetic(const SyntheticConfig& config);

}  // namespace poicalib
