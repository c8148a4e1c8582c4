#include "poicalib/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "poicalib/error.hpp"
#include "poicalib/metrics.hpp"

namespace poicalib {

std::string_view to_string(CalibrationMethod m) {
  return m == CalibrationMethod::cp_h ? "cp_h" : "cp_jsd";
}

CalibrationMethod parse_calibration_method(std::string_view name) {
  if (name == "cp_h") return CalibrationMethod::cp_h;
  if (name == "cp_jsd") return CalibrationMethod::cp_jsd;
  throw config_error("rerank", "unknown calibration method '" + std::string(name) + "'");
}

double harmonic_objective(double accuracy, double calibration, HarmonicForm form) {
  const double den = accuracy + calibration;
  if (den <= 0.0) return 0.0;
  const double h = accuracy * calibration / den;
  return form == HarmonicForm::standard ? 2.0 * h : h;
}

std::vector<double> CalibrationConfig::default_lambda_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw config_error("rerank", "lambda step must be in (0, 1]");
  std::vector<double> grid;
  const auto points = static_cast<std::size_t>(std::llround(1.0 / step));
  if (std::fabs(static_cast<double>(points) * step - 1.0) < 1e-9) {
    // k / points gives the nearest doubles to 0.05, 0.1, ... without drift.
    for (std::size_t k = 0; k <= points; ++k)
      grid.push_back(static_cast<double>(k) / static_cast<double>(points));
    return grid;
  }
  for (double l = 0.0; l < 1.0; l += step) grid.push_back(l);
  grid.push_back(1.0);
  return grid;
}

void CalibrationConfig::validate() const {
  if (final_size == 0 || final_size > base_size)
    throw config_error("rerank", "final list size must be in [1, base size]");
  for (const auto& [_, l] : lambda_by_group)
    if (!(l >= 0.0 && l <= 1.0)) throw config_error("rerank", "lambda must lie in [0, 1]");
  for (double l : lambda_grid)
    if (!(l >= 0.0 && l <= 1.0)) throw config_error("rerank", "lambda grid must lie in [0, 1]");
}

PopularityDistribution list_distribution(std::span<const ItemClass> classes) {
  std::array<std::size_t, 3> counts{};
  for (auto c : classes) ++counts[static_cast<std::size_t>(c)];
  return PopularityDistribution::from_counts(counts[0], counts[1], counts[2]);
}

PopularityDistribution list_distribution(std::span<const std::string> items,
                                         const PopularityIndex& index) {
  if (items.empty()) throw data_error("rerank", "distribution of an empty list");
  std::vector<ItemClass> classes;
  classes.reserve(items.size());
  for (const auto& item : items) classes.push_back(index.item_class(item));
  return list_distribution(classes);
}

double jsd(const PopularityDistribution& p, const PopularityDistribution& q) {
  const double ps[3] = {p.head, p.mid, p.tail};
  const double qs[3] = {q.head, q.mid, q.tail};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double m = 0.5 * (ps[k] + qs[k]);
    const double a = ps[k] > 0.0 ? ps[k] * std::log2(ps[k] / m) : 0.0;
    const double b = qs[k] > 0.0 ? qs[k] * std::log2(qs[k] / m) : 0.0;
    total += 0.5 * (a + b);
  }
  return std::clamp(total, 0.0, 1.0);
}

namespace {

std::vector<double> normalized(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  min_max_normalize(out);
  return out;
}

PopularityDistribution shares(const std::array<std::size_t, 3>& counts) {
  return PopularityDistribution::from_counts(counts[0], counts[1], counts[2]);
}

}  // namespace

std::vector<std::size_t> cp_select(std::span<const double> base_scores,
                                   std::span<const ItemClass> classes,
                                   const PopularityDistribution& target, double lambda,
                                   std::size_t n) {
  if (base_scores.size() != classes.size())
    throw data_error("rerank", "scores and classes differ in length");
  if (base_scores.size() < n)
    throw data_error("rerank", "base list has " + std::to_string(base_scores.size()) +
                                   " entries, need " + std::to_string(n));
  for (double s : base_scores)
    if (!std::isfinite(s)) throw data_error("rerank", "non-finite base score");

  const auto norm = normalized(base_scores);
  std::vector<char> taken(norm.size(), 0);
  std::vector<std::size_t> selection;
  selection.reserve(n);
  std::array<std::size_t, 3> counts{};
  double score_sum = 0.0;

  for (std::size_t step = 0; step < n; ++step) {
    const double size = static_cast<double>(step + 1);
    std::size_t best = norm.size();
    double best_value = -INFINITY;
    for (std::size_t i = 0; i < norm.size(); ++i) {
      if (taken[i]) continue;
      auto trial = counts;
      ++trial[static_cast<std::size_t>(classes[i])];
      const double rel = (score_sum + norm[i]) / size;
      const double value = (1.0 - lambda) * rel - lambda * jsd(target, shares(trial));
      if (value > best_value) {
        best_value = value;
        best = i;
      }
    }
    taken[best] = 1;
    selection.push_back(best);
    ++counts[static_cast<std::size_t>(classes[best])];
    score_sum += norm[best];
  }
  return selection;
}

double cp_objective(std::span<const double> normalized_scores, std::span<const ItemClass> classes,
                    std::span<const std::size_t> selection, const PopularityDistribution& target,
                    double lambda) {
  std::array<std::size_t, 3> counts{};
  double sum = 0.0;
  for (auto i : selection) {
    sum += normalized_scores[i];
    ++counts[static_cast<std::size_t>(classes[i])];
  }
  const double rel = sum / static_cast<double>(selection.size());
  return (1.0 - lambda) * rel - lambda * jsd(target, shares(counts));
}

ScoredList cp_rerank(const ScoredList& base, const PopularityDistribution& target, double lambda,
                     std::size_t n, const PopularityIndex& index, std::string origin) {
  std::vector<double> scores;
  std::vector<ItemClass> classes;
  for (const auto& e : base.entries) {
    scores.push_back(e.score);
    classes.push_back(index.item_class(e.item_id));
  }
  ScoredList out;
  out.user_id = base.user_id;
  out.origin = std::move(origin);
  for (auto pos : cp_select(scores, classes, target, lambda, n))
    out.entries.push_back(base.entries[pos]);
  return out;
}

std::size_t argmax_harmonic(std::span<const LambdaEvaluation> table, HarmonicForm form) {
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t g = 0; g < table.size(); ++g) {
    const double v = harmonic_objective(table[g].accuracy, table[g].calibration, form);
    if (v > best_value) {
      best_value = v;
      best = g;
    }
  }
  return best;
}

LambdaSelection select_lambda(CalibrationMethod method, std::span<const double> grid,
                              std::span<const ValidationCase> group, const PopularityIndex& index,
                              std::size_t n, HarmonicForm form) {
  if (group.empty()) throw data_error("rerank", "lambda selection over an empty user group");
  LambdaSelection result;
  if (method == CalibrationMethod::cp_jsd) {
    result.lambda = 1.0;
    return result;
  }
  if (grid.empty()) throw config_error("rerank", "empty lambda grid");

  struct Prepared {
    std::vector<double> scores;
    std::vector<ItemClass> classes;
  };
  std::vector<Prepared> prepared(group.size());
  for (std::size_t c = 0; c < group.size(); ++c) {
    if (group[c].base->entries.size() < n)
      throw data_error("rerank", "validation list of " + group[c].base->user_id + " has fewer than " +
                                     std::to_string(n) + " entries");
    for (const auto& e : group[c].base->entries) {
      if (!std::isfinite(e.score))
        throw data_error("rerank", "non-finite score in the validation list of " +
                                       group[c].base->user_id);
      prepared[c].scores.push_back(e.score);
      prepared[c].classes.push_back(index.item_class(e.item_id));
    }
  }

  result.table.resize(grid.size());
  const auto n_grid = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t g = 0; g < n_grid; ++g) {
    double ndcg_sum = 0.0, jsd_sum = 0.0;
    for (std::size_t c = 0; c < group.size(); ++c) {
      const auto& base = *group[c].base;
      const auto pick = cp_select(prepared[c].scores, prepared[c].classes, group[c].profile,
                                  grid[g], n);
      std::vector<std::string> items;
      std::vector<ItemClass> classes;
      for (auto pos : pick) {
        items.push_back(base.entries[pos].item_id);
        classes.push_back(prepared[c].classes[pos]);
      }
      ndcg_sum += ndcg_at_k(items, group[c].relevant, n);
      jsd_sum += jsd(group[c].profile, list_distribution(classes));
    }
    auto& row = result.table[g];
    row.lambda = grid[g];
    row.accuracy = ndcg_sum / static_cast<double>(group.size());
    row.calibration = 1.0 - jsd_sum / static_cast<double>(group.size());
    row.harmonic = harmonic_objective(row.accuracy, row.calibration, form);
  }
  result.lambda = result.table[argmax_harmonic(result.table, form)].lambda;
  return result;
}

}  // namespace poicalib
