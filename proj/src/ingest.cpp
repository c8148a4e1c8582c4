#include "poicalib/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <json.hpp>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "poicalib/error.hpp"
#include "poicalib/rng.hpp"

namespace poicalib {
namespace {

constexpr const char* kStage = "ingest";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// RFC 4180 fields of a single physical line (embedded newlines unsupported).
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

bool skip_line(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

// Shared validation for every format; returns false if the row was dropped.
bool accept_row(std::string_view user, std::string_view item, std::string_view ts,
                std::optional<double> lat, std::optional<double> lon, DropCounts& dropped,
                std::vector<Interaction>& rows) {
  user = trim(user);
  item = trim(item);
  if (user.empty() || item.empty() || !lat || !lon) {
    ++dropped.malformed;
    return false;
  }
  auto t = parse_timestamp(ts);
  if (!t) {
    ++dropped.bad_timestamp;
    return false;
  }
  if (!valid_coordinates(*lat, *lon)) {
    ++dropped.bad_coordinates;
    return false;
  }
  rows.push_back(Interaction{std::string(user), std::string(item), *t, *lat, *lon});
  return true;
}

void parse_snap(std::istream& in, DropCounts& dropped, std::vector<Interaction>& rows) {
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    auto f = split_tabs(trim(line));
    if (f.size() != 5) {
      ++dropped.malformed;
      continue;
    }
    accept_row(f[0], f[4], f[1], parse_double(f[2]), parse_double(f[3]), dropped, rows);
  }
}

void parse_canonical(std::istream& in, DropCounts& dropped, std::vector<Interaction>& rows) {
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    auto f = split_tabs(trim(line));
    if (f.size() != 5) {
      ++dropped.malformed;
      continue;
    }
    accept_row(f[0], f[1], f[2], parse_double(f[3]), parse_double(f[4]), dropped, rows);
  }
}

void parse_foursquare(std::istream& in, DropCounts& dropped, std::vector<Interaction>& rows) {
  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    if (skip_line(line)) continue;
    header = split_csv(trim(line));
  }
  auto column = [&](std::initializer_list<std::string_view> names) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      for (auto name : names)
        if (trim(header[i]) == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  const auto c_user = column({"userId", "user_id"});
  const auto c_item = column({"venueId", "venue_id"});
  const auto c_lat = column({"latitude", "lat"});
  const auto c_lon = column({"longitude", "lon", "lng"});
  const auto c_time = column({"utcTimestamp", "timestamp"});
  if (c_user < 0 || c_item < 0 || c_lat < 0 || c_lon < 0 || c_time < 0)
    throw data_error(kStage,
                     "foursquare_csv header must name userId, venueId, latitude, longitude, "
                     "utcTimestamp");
  const auto needed =
      static_cast<std::size_t>(std::max({c_user, c_item, c_lat, c_lon, c_time})) + 1;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    auto f = split_csv(trim(line));
    if (f.size() < needed) {
      ++dropped.malformed;
      continue;
    }
    accept_row(f[c_user], f[c_item], f[c_time], parse_double(f[c_lat]),
               parse_double(f[c_lon]), dropped, rows);
  }
}

std::optional<std::string> json_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  return std::nullopt;
}

std::optional<double> json_number(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  const double v = it->get<double>();
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

void parse_yelp(std::istream& in, DropCounts& dropped, std::vector<Interaction>& rows) {
  struct Pending {
    std::string user, item, date;
    std::optional<double> lat, lon;
  };
  std::unordered_map<std::string, GeoPoint> business;
  std::vector<Pending> pending;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) {
      ++dropped.malformed;
      continue;
    }
    auto user = json_string(j, "user_id");
    auto item = json_string(j, "business_id");
    if (!item) {
      ++dropped.malformed;
      continue;
    }
    auto lat = json_number(j, "latitude");
    auto lon = json_number(j, "longitude");
    if (!user) {
      if (lat && lon) business.try_emplace(*item, GeoPoint{*lat, *lon});
      else ++dropped.malformed;
      continue;
    }
    auto date = json_string(j, "date");
    pending.push_back(Pending{*user, *item, date.value_or(""), lat, lon});
  }
  for (auto& p : pending) {
    if (!p.lat || !p.lon) {
      auto it = business.find(p.item);
      if (it == business.end()) {
        ++dropped.bad_coordinates;
        continue;
      }
      p.lat = it->second.lat;
      p.lon = it->second.lon;
    }
    accept_row(p.user, p.item, p.date, p.lat, p.lon, dropped, rows);
  }
}

}  // namespace

InputFormat parse_input_format(std::string_view name) {
  if (name == "snap_tsv") return InputFormat::snap_tsv;
  if (name == "foursquare_csv") return InputFormat::foursquare_csv;
  if (name == "yelp_json") return InputFormat::yelp_json;
  if (name == "canonical_tsv") return InputFormat::canonical_tsv;
  throw config_error(kStage, "unknown input format '" + std::string(name) + "'");
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::snap_tsv: return "snap_tsv";
    case InputFormat::foursquare_csv: return "foursquare_csv";
    case InputFormat::yelp_json: return "yelp_json";
    case InputFormat::canonical_tsv: return "canonical_tsv";
  }
  return "?";
}

InteractionLog InteractionLog::from_rows(std::vector<Interaction> rows) {
  InteractionLog log;
  for (const auto& r : rows) log.item_coords_.try_emplace(r.item_id, GeoPoint{r.lat, r.lon});
  std::stable_sort(rows.begin(), rows.end(), [](const Interaction& a, const Interaction& b) {
    if (a.user_id != b.user_id) return a.user_id < b.user_id;
    return a.timestamp < b.timestamp;
  });
  std::size_t users = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i == 0 || rows[i].user_id != rows[i - 1].user_id) ++users;
  log.n_users_ = users;
  log.interactions_ = std::move(rows);
  return log;
}

std::vector<std::span<const Interaction>> InteractionLog::by_user() const {
  std::vector<std::span<const Interaction>> runs;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= interactions_.size(); ++i) {
    if (i == interactions_.size() || interactions_[i].user_id != interactions_[start].user_id) {
      runs.emplace_back(interactions_.data() + start, i - start);
      start = i;
    }
  }
  return runs;
}

std::vector<std::string> InteractionLog::user_ids() const {
  std::vector<std::string> ids;
  ids.reserve(n_users_);
  for (auto run : by_user()) ids.push_back(run.front().user_id);
  return ids;
}

ParseResult parse_checkins(std::istream& source, InputFormat format) {
  ParseResult result;
  std::vector<Interaction> rows;
  switch (format) {
    case InputFormat::snap_tsv: parse_snap(source, result.dropped, rows); break;
    case InputFormat::foursquare_csv: parse_foursquare(source, result.dropped, rows); break;
    case InputFormat::yelp_json: parse_yelp(source, result.dropped, rows); break;
    case InputFormat::canonical_tsv: parse_canonical(source, result.dropped, rows); break;
  }
  if (rows.empty())
    throw data_error(kStage, "no usable check-ins after filtering (" +
                                 std::to_string(result.dropped.total()) + " rows dropped)");
  result.log = InteractionLog::from_rows(std::move(rows));
  return result;
}

InteractionLog deduplicate(const InteractionLog& log) {
  std::vector<Interaction> kept;
  kept.reserve(log.size());
  for (auto run : log.by_user()) {
    std::unordered_set<std::string_view> seen;
    for (const auto& x : run)
      if (seen.insert(x.item_id).second) kept.push_back(x);
  }
  // Coordinates must stay those of the item's first occurrence in the input,
  // which may have been a dropped duplicate; carry them over explicitly.
  for (auto& x : kept) {
    const auto& p = log.item_coords().at(x.item_id);
    x.lat = p.lat;
    x.lon = p.lon;
  }
  return InteractionLog::from_rows(std::move(kept));
}

InteractionLog sample_users(const InteractionLog& log, std::size_t n_users,
                            std::size_t min_interactions, std::uint64_t seed) {
  auto runs = log.by_user();
  std::vector<std::size_t> qualifying;
  for (std::size_t u = 0; u < runs.size(); ++u)
    if (runs[u].size() >= min_interactions) qualifying.push_back(u);
  if (qualifying.size() < n_users)
    throw data_error("sample", "need " + std::to_string(n_users) + " users with >= " +
                                   std::to_string(min_interactions) + " interactions, only " +
                                   std::to_string(qualifying.size()) + " qualify (short by " +
                                   std::to_string(n_users - qualifying.size()) + ")");
  Rng rng(seed);
  shuffle_prefix(qualifying, n_users, rng);
  qualifying.resize(n_users);
  std::sort(qualifying.begin(), qualifying.end());
  std::vector<Interaction> rows;
  for (auto u : qualifying) rows.insert(rows.end(), runs[u].begin(), runs[u].end());
  return InteractionLog::from_rows(std::move(rows));
}

double compute_sparsity(std::size_t n_users, std::size_t n_items, std::size_t n_checkins) {
  if (n_users == 0 || n_items == 0) throw data_error("stats", "sparsity of an empty log");
  return 1.0 - static_cast<double>(n_checkins) /
                   (static_cast<double>(n_users) * static_cast<double>(n_items));
}

double compute_sparsity(const InteractionLog& log) {
  std::set<std::pair<std::string_view, std::string_view>> pairs;
  for (const auto& x : log.interactions()) pairs.emplace(x.user_id, x.item_id);
  return compute_sparsity(log.n_users(), log.n_items(), pairs.size());
}

SplitDataset temporal_split(const InteractionLog& log, SplitFractions fractions) {
  SplitDataset split;
  split.fractions = fractions;
  std::vector<Interaction> train, valid, test;
  for (auto run : log.by_user()) {
    const std::size_t n = run.size();
    if (n < 3) {
      ++split.dropped_users;
      continue;
    }
    const auto nd = static_cast<double>(n);
    auto c1 = static_cast<std::size_t>(std::floor(fractions.train * nd + 1e-9));
    auto c2 = static_cast<std::size_t>(
        std::floor((fractions.train + fractions.validation) * nd + 1e-9));
    // The log is already stably ordered by timestamp within each user.
    train.insert(train.end(), run.begin(), run.begin() + c1);
    valid.insert(valid.end(), run.begin() + c1, run.begin() + c2);
    test.insert(test.end(), run.begin() + c2, run.end());
  }
  split.train = InteractionLog::from_rows(std::move(train));
  split.validation = InteractionLog::from_rows(std::move(valid));
  split.test = InteractionLog::from_rows(std::move(test));
  return split;
}

}  // namespace poicalib
