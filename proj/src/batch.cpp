#include "poicalib/batch.hpp"

#include <iostream>
#include <omp.h>

#include "poicalib/error.hpp"

namespace poicalib {
namespace {

std::span<const ItemIndex> exclusions_for(const std::vector<std::vector<ItemIndex>>* excluded,
                                          UserIndex u) {
  if (!excluded || u >= excluded->size()) return {};
  return (*excluded)[u];
}

void warn_short(std::size_t count, std::size_t m) {
  if (count > 0)
    std::cerr << "warning: " << count << " users have fewer than " << m
              << " candidates; returning all of them\n";
}

void check_sizes(std::span<const ScoredList> base, std::span<const PopularityDistribution> targets,
                 std::span<const double> lambdas) {
  if (targets.size() != base.size() || lambdas.size() != base.size())
    throw data_error("rerank", "re-ranking inputs differ in length");
}

}  // namespace

std::vector<ScoredList> recommend_all(const Recommender& model, std::size_t m,
                                      const std::vector<std::vector<ItemIndex>>* excluded) {
  const auto n_users = static_cast<std::ptrdiff_t>(model.data().users.size());
  std::vector<ScoredList> out(model.data().users.size());
  std::size_t short_lists = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : short_lists)
  for (std::ptrdiff_t u = 0; u < n_users; ++u) {
    bool is_short = false;
    const auto user = static_cast<UserIndex>(u);
    out[u] = top_m(model, user, m, exclusions_for(excluded, user), &is_short);
    short_lists += is_short ? 1 : 0;
  }
  warn_short(short_lists, m);
  return out;
}

std::vector<ScoredList> rerank_all(std::span<const ScoredList> base,
                                   std::span<const PopularityDistribution> targets,
                                   std::span<const double> lambdas, std::size_t n,
                                   const PopularityIndex& index, const std::string& origin) {
  check_sizes(base, targets, lambdas);
  std::vector<ScoredList> out(base.size());
  const auto count = static_cast<std::ptrdiff_t>(base.size());
  // Exceptions may not cross the OpenMP region boundary.
  std::vector<std::string> errors(base.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      out[k] = cp_rerank(base[k], targets[k], lambdas[k], n, index, origin);
    } catch (const std::exception& e) {
      errors[k] = base[k].user_id + ": " + e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw data_error("rerank", e);
  return out;
}

namespace serial {

std::vector<ScoredList> recommend_all(const Recommender& model, std::size_t m,
                                      const std::vector<std::vector<ItemIndex>>* excluded) {
  std::vector<ScoredList> out;
  std::size_t short_lists = 0;
  for (UserIndex u = 0; u < model.data().users.size(); ++u) {
    bool is_short = false;
    out.push_back(top_m(model, u, m, exclusions_for(excluded, u), &is_short));
    short_lists += is_short ? 1 : 0;
  }
  warn_short(short_lists, m);
  return out;
}

std::vector<ScoredList> rerank_all(std::span<const ScoredList> base,
                                   std::span<const PopularityDistribution> targets,
                                   std::span<const double> lambdas, std::size_t n,
                                   const PopularityIndex& index, const std::string& origin) {
  check_sizes(base, targets, lambdas);
  std::vector<ScoredList> out;
  out.reserve(base.size());
  for (std::size_t k = 0; k < base.size(); ++k)
    out.push_back(cp_rerank(base[k], targets[k], lambdas[k], n, index, origin));
  return out;
}

}  // namespace serial

void set_thread_count(int threads) { omp_set_num_threads(threads < 1 ? 1 : threads); }

int thread_count() { return omp_get_max_threads(); }

}  // namespace poicalib
