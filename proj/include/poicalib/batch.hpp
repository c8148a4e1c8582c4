#pragma once

#include <span>
#include <string>
#include <vector>

#include "poicalib/calibration.hpp"
#include "poicalib/recommender.hpp"

namespace poicalib {

/// top_m for every train user, in user index order. `excluded`, when given,
/// holds per-user sorted item indices to drop as well (validation items at
/// test time). OpenMP over users.
std::vector<ScoredList> recommend_all(const Recommender& model, std::size_t m,
                                      const std::vector<std::vector<ItemIndex>>* excluded = nullptr);

/// cp_rerank for every list; targets and lambdas are per list.
std::vector<ScoredList> rerank_all(std::span<const ScoredList> base,
                                   std::span<const PopularityDistribution> targets,
                                   std::span<const double> lambdas, std::size_t n,
                                   const PopularityIndex& index, const std::string& origin);

/// Plain loops with the same contracts; kept as references for tests and
/// benchmarks.
namespace serial {
std::vector<ScoredList> recommend_all(const Recommender& model, std::size_t m,
                                      const std::vector<std::vector<ItemIndex>>* excluded = nullptr);
std::vector<ScoredList> rerank_all(std::span<const ScoredList> base,
                                   std::span<const PopularityDistribution> targets,
                                   std::span<const double> lambdas, std::size_t n,
                                   const PopularityIndex& index, const std::string& origin);
}  // namespace serial

/// Thread cap for every OpenMP kernel (values < 1 mean 1).
void set_thread_count(int threads);
int thread_count();

}  // namespace poicalib
