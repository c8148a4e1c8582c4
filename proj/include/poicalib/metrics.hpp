#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poicalib/popularity.hpp"

namespace poicalib {

/// Binary-relevance nDCG@k; 0 when nothing is relevant.
double ndcg_at_k(std::span<const std::string> recommended, std::span<const std::string> relevant,
                 std::size_t k = 10);

/// Mean item pop over the list. Throws a data error for an empty list.
double arp_user(std::span<const std::string> list, const PopularityIndex& index);

/// (arp - profile) / profile, or nullopt when profile_pop is not positive.
std::optional<double> poplift_user(double arp, double profile_pop);

/// Pooled (tail, mid, head) shares over every slot of every list.
struct ClassShares {
  double tail = 0.0;
  double mid = 0.0;
  double head = 0.0;
};
ClassShares item_group_ratios(std::span<const std::vector<std::string>> lists,
                              const PopularityIndex& index);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
};

/// Paired two-sided t-test on d = y - x. A zero-variance difference gives
/// p = 1 when mean(d) = 0 and p = 0 otherwise. Throws an evaluation error on
/// length mismatch or fewer than two pairs.
TTestResult paired_ttest(std::span<const double> x, std::span<const double> y);

/// min(1, p * k).
double bonferroni(double p, std::size_t k);

/// 100 (treatment - base) / |base|; nullopt when base is zero.
std::optional<double> delta_percent(double base, double treatment);

struct UserMetrics {
  std::string user_id;
  UserGroup group = UserGroup::med_pop;
  double ndcg = 0.0;
  double arp = 0.0;
  std::optional<double> poplift;
  double jsd = 0.0;  // to the user's train profile distribution
};

/// Everything needed to score one user's final list.
struct EvaluationCase {
  std::string user_id;
  std::vector<std::string> recommended;
  std::vector<std::string> relevant;  // test items
};

/// Per-user metrics for every case whose user has test items; cases with an
/// empty relevant set are skipped. OpenMP over users, output in input order.
std::vector<UserMetrics> evaluate_users(std::span<const EvaluationCase> cases,
                                        const InteractionLog& train, const PopularityIndex& index,
                                        std::size_t k = 10);

namespace serial {
std::vector<UserMetrics> evaluate_users(std::span<const EvaluationCase> cases,
                                        const InteractionLog& train, const PopularityIndex& index,
                                        std::size_t k = 10);
}  // namespace serial

inline constexpr std::array<std::string_view, 4> kMetricNames = {"ndcg", "arp", "poplift", "jsd"};
inline constexpr std::array<std::string_view, 4> kGroupRows = {"LowPop", "MedPop", "HighPop",
                                                               "All"};

/// One (group, metric) cell of a metrics table.
struct MetricSummary {
  std::string group;
  std::string metric;
  double mean = 0.0;
  std::size_t n_users = 0;
  std::optional<double> delta_pct;
  std::optional<double> p_raw;
  std::optional<double> p_adjusted;
  bool significant = false;
};

/// Group means of `treatment` and, when `baseline` is given, Δ% and paired
/// t-tests against it (users matched by id), Bonferroni-adjusted with k.
std::vector<MetricSummary> summarize(std::span<const UserMetrics> treatment,
                                     const std::vector<UserMetrics>* baseline,
                                     std::size_t bonferroni_k, double alpha = 0.05);

/// Extracts one metric; PopLift-less users are skipped.
std::vector<std::pair<std::string, double>> metric_values(std::span<const UserMetrics> users,
                                                          std::string_view metric,
                                                          std::string_view group_row);

}  // namespace poicalib
