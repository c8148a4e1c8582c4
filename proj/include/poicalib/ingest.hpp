#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poicalib/geo.hpp"

namespace poicalib {

/// One check-in event.
struct Interaction {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

enum class InputFormat { snap_tsv, foursquare_csv, yelp_json, canonical_tsv };

/// Throws a config error for anything other than the four known names.
InputFormat parse_input_format(std::string_view name);
std::string_view to_string(InputFormat format);

/// Parses ISO-8601 (`2010-10-17T01:48:53Z`, `2016-03-09 00:44:42`, optional
/// fractional seconds and `Z`/`+hh:mm` offset), integer epoch seconds, and the
/// `Tue Apr 03 18:00:09 +0000 2012` form used by the Foursquare dumps.
/// Returns nullopt for anything else or for instants before the epoch.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

/// Immutable, canonically ordered check-in log.
///
/// Interactions are sorted by (user_id, timestamp), ties kept in input
/// order. `item_coords` holds exactly the items that occur, with the
/// coordinates of each item's first occurrence in input order.
class InteractionLog {
 public:
  InteractionLog() = default;
  static InteractionLog from_rows(std::vector<Interaction> rows);

  const std::vector<Interaction>& interactions() const noexcept { return interactions_; }
  const std::map<std::string, GeoPoint>& item_coords() const noexcept { return item_coords_; }
  std::size_t n_users() const noexcept { return n_users_; }
  std::size_t n_items() const noexcept { return item_coords_.size(); }
  std::size_t size() const noexcept { return interactions_.size(); }
  bool empty() const noexcept { return interactions_.empty(); }

  /// Contiguous per-user runs, in user id order.
  std::vector<std::span<const Interaction>> by_user() const;
  std::vector<std::string> user_ids() const;

 private:
  std::vector<Interaction> interactions_;
  std::map<std::string, GeoPoint> item_coords_;
  std::size_t n_users_ = 0;
};

struct DropCounts {
  std::size_t malformed = 0;
  std::size_t bad_timestamp = 0;
  std::size_t bad_coordinates = 0;

  std::size_t total() const { return malformed + bad_timestamp + bad_coordinates; }
};

struct ParseResult {
  InteractionLog log;
  DropCounts dropped;
};

/// Reads a check-in dump into a canonical log.
///
/// snap_tsv:       user, ISO timestamp, lat, lon, location id (tab separated)
/// foursquare_csv: header row; columns `userId`, `venueId`, `latitude`,
///                 `longitude`, `utcTimestamp` (RFC 4180 quoting)
/// yelp_json:      JSON lines. Records with `business_id` + `latitude` +
///                 `longitude` and no `user_id` register coordinates;
///                 records with `user_id` + `business_id` + `date` are
///                 check-ins, located through the business records (or their
///                 own `latitude`/`longitude` if present)
/// canonical_tsv:  user_id, item_id, epoch seconds, lat, lon
///
/// Blank lines and lines beginning with '#' are skipped in the text formats.
/// Unparseable rows are dropped and counted. Throws a data error if nothing
/// survives.
ParseResult parse_checkins(std::istream& source, InputFormat format);

/// One record per (user, item), keeping the earliest visit.
InteractionLog deduplicate(const InteractionLog& log);

/// Seeded uniform sample of `n_users` users among those with at least
/// `min_interactions` interactions. Qualifying users are taken in id order
/// and permuted with shuffle_prefix() on Rng(seed); the first n_users win.
/// Throws a data error naming the shortfall when too few users qualify.
InteractionLog sample_users(const InteractionLog& log, std::size_t n_users,
                            std::size_t min_interactions, std::uint64_t seed);

/// 1 - checkins / (users * items).
double compute_sparsity(std::size_t n_users, std::size_t n_items, std::size_t n_checkins);
double compute_sparsity(const InteractionLog& log);

struct SplitFractions {
  double train = 0.65;
  double validation = 0.15;
  double test = 0.20;
};

struct SplitDataset {
  InteractionLog train;
  InteractionLog validation;
  InteractionLog test;
  SplitFractions fractions;
  std::size_t dropped_users = 0;  // fewer than 3 interactions
};

/// Per-user chronological split with cut indices floor(0.65 n), floor(0.80 n).
SplitDataset temporal_split(const InteractionLog& log, SplitFractions fractions = {});

}  // namespace poicalib
