#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poicalib/popularity.hpp"
#include "poicalib/recommender.hpp"

namespace poicalib {

enum class CalibrationMethod { cp_h, cp_jsd };

std::string_view to_string(CalibrationMethod m);
CalibrationMethod parse_calibration_method(std::string_view name);

/// Which harmonic-mean form CP_H maximises. Both share every argmax; the
/// scaled form exists so that equivalence can be checked.
enum class HarmonicForm { standard, halved };  // 2ac/(a+c), ac/(a+c)

double harmonic_objective(double accuracy, double calibration,
                          HarmonicForm form = HarmonicForm::standard);

struct CalibrationConfig {
  std::map<UserGroup, double> lambda_by_group;
  std::size_t base_size = kBaseListSize;
  std::size_t final_size = kFinalListSize;
  std::vector<double> lambda_grid = default_lambda_grid();

  /// 0, 0.05, ..., 1 (21 points).
  static std::vector<double> default_lambda_grid(double step = 0.05);
  /// Throws a config error on λ outside [0,1] or final_size > base_size.
  void validate() const;
};

/// H/M/T shares of a list. Throws a data error for an empty list.
PopularityDistribution list_distribution(std::span<const std::string> items,
                                         const PopularityIndex& index);
PopularityDistribution list_distribution(std::span<const ItemClass> classes);

/// Base-2 Jensen-Shannon divergence with 0 log 0 = 0; lies in [0, 1].
double jsd(const PopularityDistribution& p, const PopularityDistribution& q);

/// Greedy calibrated-popularity selection over a base list.
///
/// Scores are min-max normalised over the base list; Rel(L) is the mean
/// normalised score of L. Each of n steps appends the unselected item that
/// maximises (1 - λ) Rel(L + i) - λ JSD(P, Q(L + i)); ties go to the item
/// ranked higher in the base list. Returns base-list positions in selection
/// order.
std::vector<std::size_t> cp_select(std::span<const double> base_scores,
                                   std::span<const ItemClass> classes,
                                   const PopularityDistribution& target, double lambda,
                                   std::size_t n);

/// The objective cp_select greedily maximises, for a complete selection.
double cp_objective(std::span<const double> normalized_scores, std::span<const ItemClass> classes,
                    std::span<const std::size_t> selection, const PopularityDistribution& target,
                    double lambda);

/// cp_select on a ScoredList; the result carries the base scores and the
/// given origin tag. Throws a data error if the base list is shorter than n.
ScoredList cp_rerank(const ScoredList& base, const PopularityDistribution& target, double lambda,
                     std::size_t n, const PopularityIndex& index, std::string origin = "cp");

/// One user's validation material for λ selection.
struct ValidationCase {
  const ScoredList* base = nullptr;
  PopularityDistribution profile;
  std::vector<std::string> relevant;  // validation items
};

struct LambdaEvaluation {
  double lambda = 0.0;
  double accuracy = 0.0;     // group mean nDCG@n
  double calibration = 0.0;  // 1 - group mean JSD
  double harmonic = 0.0;

  friend bool operator==(const LambdaEvaluation&, const LambdaEvaluation&) = default;
};

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<LambdaEvaluation> table;  // empty for CP_JSD
};

/// CP_JSD: λ = 1. CP_H: grid search maximising the harmonic mean of group
/// nDCG@n and 1 - group JSD; ties go to the smaller λ. OpenMP over grid
/// points. Throws a data error for an empty group.
LambdaSelection select_lambda(CalibrationMethod method, std::span<const double> grid,
                              std::span<const ValidationCase> group, const PopularityIndex& index,
                              std::size_t n = kFinalListSize,
                              HarmonicForm form = HarmonicForm::standard);

/// Index of the best grid row under `form` (ties to the earliest row).
std::size_t argmax_harmonic(std::span<const LambdaEvaluation> table, HarmonicForm form);

}  // namespace poicalib
