#include "poicalib/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <unordered_set>

#include "poicalib/calibration.hpp"
#include "poicalib/error.hpp"

namespace poicalib {

double ndcg_at_k(std::span<const std::string> recommended, std::span<const std::string> relevant,
                 std::size_t k) {
  if (k == 0) throw evaluation_error("evaluate", "nDCG cutoff must be at least 1");
  std::unordered_set<std::string_view> rel(relevant.begin(), relevant.end());
  if (rel.empty()) return 0.0;
  double dcg = 0.0;
  const std::size_t depth = std::min(k, recommended.size());
  for (std::size_t i = 0; i < depth; ++i)
    if (rel.contains(recommended[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, rel.size());
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

double arp_user(std::span<const std::string> list, const PopularityIndex& index) {
  if (list.empty()) throw data_error("evaluate", "ARP of an empty list");
  double sum = 0.0;
  for (const auto& item : list) sum += index.item_pop(item);
  return sum / static_cast<double>(list.size());
}

std::optional<double> poplift_user(double arp, double profile_pop) {
  if (!(profile_pop > 0.0)) return std::nullopt;
  return (arp - profile_pop) / profile_pop;
}

ClassShares item_group_ratios(std::span<const std::vector<std::string>> lists,
                              const PopularityIndex& index) {
  std::array<std::size_t, 3> counts{};
  for (const auto& list : lists)
    for (const auto& item : list) ++counts[static_cast<std::size_t>(index.item_class(item))];
  const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
  if (total == 0) return {};
  return {static_cast<double>(counts[2]) / total, static_cast<double>(counts[1]) / total,
          static_cast<double>(counts[0]) / total};
}

TTestResult paired_ttest(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw evaluation_error("evaluate", "paired t-test on samples of different length");
  const std::size_t n = x.size();
  if (n < 2) throw evaluation_error("evaluate", "paired t-test needs at least two pairs");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - x[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  r.df = n - 1;
  if (sd == 0.0) {
    r.t = mean == 0.0 ? 0.0 : std::copysign(INFINITY, mean);
    r.p = mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(r.df));
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

double bonferroni(double p, std::size_t k) {
  if (k == 0) throw evaluation_error("evaluate", "Bonferroni family size must be >= 1");
  return std::min(1.0, p * static_cast<double>(k));
}

std::optional<double> delta_percent(double base, double treatment) {
  if (base == 0.0) return std::nullopt;
  return 100.0 * (treatment - base) / std::fabs(base);
}

namespace {

UserMetrics evaluate_one(const EvaluationCase& c, const PopularityIndex& index,
                         const PopularityDistribution& profile, std::size_t k) {
  UserMetrics m;
  m.user_id = c.user_id;
  m.group = index.user_group(c.user_id);
  m.ndcg = ndcg_at_k(c.recommended, c.relevant, k);
  m.arp = arp_user(c.recommended, index);
  m.poplift = poplift_user(m.arp, index.user_profile_pop(c.user_id));
  m.jsd = jsd(profile, list_distribution(c.recommended, index));
  return m;
}

std::vector<UserMetrics> collect(std::vector<std::optional<UserMetrics>>& slots) {
  std::vector<UserMetrics> out;
  std::size_t no_poplift = 0;
  for (auto& s : slots)
    if (s) {
      if (!s->poplift) ++no_poplift;
      out.push_back(std::move(*s));
    }
  if (no_poplift > 0)
    std::cerr << "warning: " << no_poplift << " users with zero profile popularity excluded from "
              << "PopLift\n";
  return out;
}

}  // namespace

std::vector<UserMetrics> evaluate_users(std::span<const EvaluationCase> cases,
                                        const InteractionLog& train, const PopularityIndex& index,
                                        std::size_t k) {
  const auto profiles = profile_distributions(train, index);
  std::vector<std::optional<UserMetrics>> slots(cases.size());
  std::vector<std::size_t> user_of(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) user_of[c] = index.users().at(cases[c].user_id);
  const auto n = static_cast<std::ptrdiff_t>(cases.size());
  std::vector<std::string> errors(cases.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const auto& ec = cases[c];
    if (ec.relevant.empty()) continue;
    try {
      slots[c] = evaluate_one(ec, index, profiles[user_of[c]], k);
    } catch (const std::exception& e) {
      errors[c] = ec.user_id + ": " + e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw evaluation_error("evaluate", e);
  return collect(slots);
}

namespace serial {
std::vector<UserMetrics> evaluate_users(std::span<const EvaluationCase> cases,
                                        const InteractionLog& train, const PopularityIndex& index,
                                        std::size_t k) {
  std::vector<std::optional<UserMetrics>> slots(cases.size());
  for (std::size_t c = 0; c < cases.size(); ++c) {
    if (cases[c].relevant.empty()) continue;
    slots[c] = evaluate_one(cases[c], index,
                            profile_distribution(cases[c].user_id, train, index), k);
  }
  return collect(slots);
}
}  // namespace serial

std::vector<std::pair<std::string, double>> metric_values(std::span<const UserMetrics> users,
                                                          std::string_view metric,
                                                          std::string_view group_row) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& u : users) {
    if (group_row != "All" && to_string(u.group) != group_row) continue;
    double v;
    if (metric == "ndcg") v = u.ndcg;
    else if (metric == "arp") v = u.arp;
    else if (metric == "jsd") v = u.jsd;
    else if (metric == "poplift") {
      if (!u.poplift) continue;
      v = *u.poplift;
    } else {
      throw evaluation_error("evaluate", "unknown metric '" + std::string(metric) + "'");
    }
    out.emplace_back(u.user_id, v);
  }
  return out;
}

std::vector<MetricSummary> summarize(std::span<const UserMetrics> treatment,
                                     const std::vector<UserMetrics>* baseline,
                                     std::size_t bonferroni_k, double alpha) {
  std::vector<MetricSummary> rows;
  for (auto metric : kMetricNames) {
    for (auto group : kGroupRows) {
      MetricSummary s;
      s.group = std::string(group);
      s.metric = std::string(metric);
      auto values = metric_values(treatment, metric, group);
      s.n_users = values.size();
      double sum = 0.0;
      for (const auto& [_, v] : values) sum += v;
      s.mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
      if (baseline) {
        auto base_values = metric_values(*baseline, metric, group);
        std::map<std::string_view, double> base_by_user;
        double base_sum = 0.0;
        for (const auto& [u, v] : base_values) base_by_user.emplace(u, v), base_sum += v;
        if (!base_values.empty())
          s.delta_pct = delta_percent(base_sum / static_cast<double>(base_values.size()), s.mean);
        std::vector<double> x, y;
        for (const auto& [u, v] : values)
          if (auto it = base_by_user.find(u); it != base_by_user.end()) {
            x.push_back(it->second);
            y.push_back(v);
          }
        if (x.size() >= 2) {
          s.p_raw = paired_ttest(x, y).p;
          s.p_adjusted = bonferroni(*s.p_raw, bonferroni_k);
          s.significant = *s.p_adjusted < alpha;
        }
      }
      rows.push_back(std::move(s));
    }
  }
  return rows;
}

}  // namespace poicalib
