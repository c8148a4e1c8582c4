#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poicalib/ingest.hpp"
#include "poicalib/vocabulary.hpp"

namespace poicalib {

enum class ItemClass : std::uint8_t { head = 0, mid = 1, tail = 2 };
enum class UserGroup : std::uint8_t { low_pop = 0, med_pop = 1, high_pop = 2 };

inline constexpr std::array<UserGroup, 3> kUserGroups = {UserGroup::low_pop, UserGroup::med_pop,
                                                         UserGroup::high_pop};

std::string_view to_string(ItemClass c);
std::string_view to_string(UserGroup g);
UserGroup parse_user_group(std::string_view name);

/// Share of head, mid and tail items; sums to one.
struct PopularityDistribution {
  double head = 0.0;
  double mid = 0.0;
  double tail = 0.0;

  double operator[](ItemClass c) const {
    return c == ItemClass::head ? head : c == ItemClass::mid ? mid : tail;
  }
  static PopularityDistribution from_counts(std::size_t h, std::size_t m, std::size_t t);
};

/// Item popularity and the H/M/T and LowPop/MedPop/HighPop partitions, all
/// computed from the training split only.
///
/// pop(i) = distinct train users who visited i / train users. Items are
/// ranked by pop descending (id ascending on ties): the first floor(0.2 n)
/// are head, the last floor(0.2 n) tail. Users are ranked by mean profile pop
/// ascending (id ascending on ties): the first floor(0.2 n) are LowPop, the
/// last floor(0.2 n) HighPop.
class PopularityIndex {
 public:
  static PopularityIndex build(const InteractionLog& train);

  const Vocabulary& items() const noexcept { return items_; }
  const Vocabulary& users() const noexcept { return users_; }

  double item_pop(std::string_view item_id) const { return item_pop_[items_.at(item_id, "item")]; }
  ItemClass item_class(std::string_view item_id) const {
    return item_class_[items_.at(item_id, "item")];
  }
  double user_profile_pop(std::string_view user_id) const {
    return user_pop_[users_.at(user_id, "user")];
  }
  UserGroup user_group(std::string_view user_id) const {
    return user_group_[users_.at(user_id, "user")];
  }

  std::span<const double> item_pops() const noexcept { return item_pop_; }
  std::span<const ItemClass> item_classes() const noexcept { return item_class_; }
  std::span<const double> user_pops() const noexcept { return user_pop_; }
  std::span<const UserGroup> user_groups() const noexcept { return user_group_; }

  /// Smallest pop among head items and largest among tail items.
  double head_cut() const noexcept { return head_cut_; }
  double tail_cut() const noexcept { return tail_cut_; }
  /// Smallest profile pop among HighPop and largest among LowPop users.
  double high_pop_cut() const noexcept { return high_cut_; }
  double low_pop_cut() const noexcept { return low_cut_; }

  /// popularity.json document.
  std::string to_json() const;

 private:
  Vocabulary items_;
  Vocabulary users_;
  std::vector<double> item_pop_;
  std::vector<ItemClass> item_class_;
  std::vector<double> user_pop_;
  std::vector<UserGroup> user_group_;
  double head_cut_ = 0.0, tail_cut_ = 0.0, high_cut_ = 0.0, low_cut_ = 0.0;
};

/// H/M/T shares of the user's train items. Throws for unknown users.
PopularityDistribution profile_distribution(std::string_view user_id, const InteractionLog& train,
                                            const PopularityIndex& index);

/// All profiles at once, indexed like index.users().
std::vector<PopularityDistribution> profile_distributions(const InteractionLog& train,
                                                          const PopularityIndex& index);

}  // namespace poicalib
