#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <climits>
#include <map>
#include <set>
#include <sstream>

#include "poicalib/error.hpp"
#include "poicalib/ingest.hpp"
#include "poicalib/io.hpp"
#include "poicalib/rng.hpp"
#include "support.hpp"

using namespace poicalib;
using testing::make_log;

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("1333476009") == 1333476009);
  CHECK(parse_timestamp("2012-04-03T18:00:09Z") == 1333476009);
  CHECK(parse_timestamp("2012-04-03 18:00:09") == 1333476009);
  CHECK(parse_timestamp("2012-04-03T20:00:09+02:00") == 1333476009);
  CHECK(parse_timestamp("2012-04-03T18:00:09.250Z") == 1333476009);
  CHECK(parse_timestamp("Tue Apr 03 18:00:09 +0000 2012") == 1333476009);
  CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK_FALSE(parse_timestamp("2012-13-03T18:00:09Z"));
  CHECK_FALSE(parse_timestamp(""));
}

TEST_CASE("snap rows") {
  std::istringstream one("0\t2010-10-17T01:48:53Z\t39.75\t-104.98\tloc1\n");
  auto r = parse_checkins(one, InputFormat::snap_tsv);
  CHECK(r.log.size() == 1);
  CHECK(r.log.n_users() == 1);
  CHECK(r.log.n_items() == 1);
  CHECK(r.dropped.total() == 0);

  std::istringstream mixed(
      "0\t2010-10-17T01:48:53Z\t39.75\t-104.98\tloc1\n"
      "0\t2010-10-18T01:48:53Z\t95.0\t-104.98\tloc2\n"
      "1\tnot-a-time\t39.75\t-104.98\tloc1\n"
      "1\t2010-10-17T01:48:53Z\t39.75\n"
      "1\t2010-10-19T01:48:53Z\t39.75\t-104.98\tloc1\n"
      "1\t2010-10-20T01:48:53Z\t39.75\t-104.98\tloc1\n");
  r = parse_checkins(mixed, InputFormat::snap_tsv);
  CHECK(r.dropped.bad_coordinates == 1);
  CHECK(r.dropped.bad_timestamp == 1);
  CHECK(r.dropped.malformed == 1);
  // repeat visits survive parsing
  CHECK(r.log.size() == 3);
}

TEST_CASE("empty or unknown input is rejected") {
  std::istringstream bad("0\tx\t1\t1\tl\n");
  CHECK_THROWS_AS(parse_checkins(bad, InputFormat::snap_tsv), Error);
  CHECK_THROWS_AS(parse_input_format("parquet"), Error);
  for (auto f : {InputFormat::snap_tsv, InputFormat::foursquare_csv, InputFormat::yelp_json,
                 InputFormat::canonical_tsv})
    CHECK(parse_input_format(to_string(f)) == f);
}

TEST_CASE("foursquare csv") {
  std::istringstream in(
      "userId,venueId,venueCategory,latitude,longitude,timezoneOffset,utcTimestamp\n"
      "470,49bbd6c0f964a520f4531fe3,\"Arts, Crafts\",40.719810,-74.002581,-240,"
      "Tue Apr 03 18:00:09 +0000 2012\n"
      "979,4a43c0aef964a520c6a61fe3,Bridge,40.606800,-74.044170,-240,"
      "Tue Apr 03 18:00:25 +0000 2012\n");
  auto r = parse_checkins(in, InputFormat::foursquare_csv);
  REQUIRE(r.log.size() == 2);
  const auto& first = r.log.interactions().front();
  CHECK(first.user_id == "470");
  CHECK(first.item_id == "49bbd6c0f964a520f4531fe3");
  CHECK(first.timestamp == 1333476009);
  CHECK(first.lat == doctest::Approx(40.719810));
}

TEST_CASE("yelp json lines") {
  std::istringstream in(
      R"({"business_id":"b1","latitude":36.1,"longitude":-115.2})"
      "\n"
      R"({"user_id":"u1","business_id":"b1","date":"2016-03-09 12:00:00"})"
      "\n"
      R"({"user_id":"u1","business_id":"b2","date":"2016-03-10 12:00:00"})"
      "\n");
  auto r = parse_checkins(in, InputFormat::yelp_json);
  REQUIRE(r.log.size() == 1);
  CHECK(r.log.interactions()[0].lat == doctest::Approx(36.1));
  CHECK(r.dropped.bad_coordinates == 1);
}

TEST_CASE("canonical round trip") {
  auto log = testing::random_log(3);
  std::ostringstream out;
  write_canonical(out, log);
  std::istringstream in(out.str());
  auto back = parse_checkins(in, InputFormat::canonical_tsv).log;
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back.interactions()[i].user_id == log.interactions()[i].user_id);
    CHECK(back.interactions()[i].item_id == log.interactions()[i].item_id);
    CHECK(back.interactions()[i].timestamp == log.interactions()[i].timestamp);
  }
}

TEST_CASE("deduplicate keeps the earliest visit") {
  auto log = make_log({{"A", "X", 20}, {"A", "X", 10}, {"A", "Y", 15}});
  auto d = deduplicate(log);
  REQUIRE(d.size() == 2);
  CHECK(d.interactions()[0].item_id == "X");
  CHECK(d.interactions()[0].timestamp == 10);
  CHECK(d.interactions()[1].item_id == "Y");

  auto twice = make_log({{"a", "x", 1}, {"a", "x", 2}, {"b", "x", 1}, {"b", "x", 3},
                         {"c", "y", 5}, {"c", "y", 1}});
  CHECK(deduplicate(twice).size() == 3);
}

TEST_CASE("deduplicate is idempotent") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto once = deduplicate(testing::random_log(s));
    auto again = deduplicate(once);
    CHECK(again.interactions() == once.interactions());
  }
}

TEST_CASE("sample_users matches a seeded shuffle oracle") {
  std::vector<testing::Row> rows;
  for (int u = 0; u < 12; ++u) {
    const int visits = u < 10 ? 4 : 1;  // users 10 and 11 do not qualify
    for (int v = 0; v < visits; ++v)
      rows.push_back({"u" + std::to_string(u), "i" + std::to_string(u * 10 + v), v});
  }
  auto log = make_log(rows);
  auto sample = sample_users(log, 3, 2, 7);

  std::vector<std::string> qualifying;
  for (int u = 0; u < 10; ++u) qualifying.push_back("u" + std::to_string(u));
  std::sort(qualifying.begin(), qualifying.end());
  Rng rng(7);
  for (std::size_t i = 0; i + 1 < qualifying.size(); ++i) {
    auto j = i + rng.below(qualifying.size() - i);
    std::swap(qualifying[i], qualifying[j]);
  }
  std::vector<std::string> expected(qualifying.begin(), qualifying.begin() + 3);
  std::sort(expected.begin(), expected.end());
  CHECK(sample.user_ids() == expected);
  CHECK(sample.size() == 12);
  CHECK(sample.n_items() == 12);

  CHECK(sample_users(log, 3, 2, 7).interactions() == sample.interactions());
  CHECK(sample_users(log, 10, 2, 1).user_ids().size() == 10);
  CHECK_THROWS_AS(sample_users(log, 11, 2, 7), Error);
}

TEST_CASE("sparsity") {
  CHECK(std::abs(compute_sparsity(1500, 2804, 69401) - 0.9835) < 5e-7);
  CHECK(format_fixed(compute_sparsity(1500, 2804, 69401), 6) == "0.983500");
  CHECK(format_fixed(compute_sparsity(600, 794, 15341), 6) == "0.967798");
  CHECK(format_fixed(compute_sparsity(1500, 7579, 53679), 6) == "0.995278");
  CHECK(format_fixed(compute_sparsity(1500, 4515, 35288), 6) == "0.994790");
  CHECK(compute_sparsity(2, 2, 4) == 0.0);
  CHECK_THROWS_AS(compute_sparsity(0, 2, 0), Error);
  auto log = make_log({{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 1}});
  CHECK(compute_sparsity(log) == doctest::Approx(0.25));
}

TEST_CASE("split cut points") {
  auto split_sizes = [](int n) {
    std::vector<testing::Row> rows;
    for (int k = 0; k < n; ++k) rows.push_back({"u", "i" + std::to_string(k), 100 + k});
    auto s = temporal_split(make_log(rows));
    return std::tuple{s.train.size(), s.validation.size(), s.test.size()};
  };
  CHECK(split_sizes(20) == std::tuple{13u, 3u, 4u});
  CHECK(split_sizes(3) == std::tuple{1u, 1u, 1u});
  CHECK(split_sizes(100) == std::tuple{65u, 15u, 20u});

  auto s = temporal_split(make_log({{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 1}, {"b", "y", 2},
                                    {"b", "z", 3}}));
  CHECK(s.dropped_users == 1);
  CHECK(s.train.n_users() == 1);
}

TEST_CASE("split partitions each user in time order") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto log = deduplicate(testing::random_log(seed));
    auto s = temporal_split(log);
    std::map<std::string, std::vector<Interaction>> all, parts[3];
    for (const auto& r : log.interactions()) all[r.user_id].push_back(r);
    const InteractionLog* logs[3] = {&s.train, &s.validation, &s.test};
    for (int p = 0; p < 3; ++p)
      for (const auto& r : logs[p]->interactions()) parts[p][r.user_id].push_back(r);
    std::size_t dropped = 0;
    for (const auto& [user, rows] : all) {
      if (rows.size() < 3) {
        ++dropped;
        CHECK(parts[0].count(user) == 0);
        continue;
      }
      std::multiset<std::string> seen;
      for (int p = 0; p < 3; ++p)
        for (const auto& r : parts[p][user]) seen.insert(r.item_id);
      std::multiset<std::string> expect;
      for (const auto& r : rows) expect.insert(r.item_id);
      CHECK(seen == expect);
      auto max_ts = [](const std::vector<Interaction>& v) {
        std::int64_t m = INT64_MIN;
        for (auto& r : v) m = std::max(m, r.timestamp);
        return m;
      };
      auto min_ts = [](const std::vector<Interaction>& v) {
        std::int64_t m = INT64_MAX;
        for (auto& r : v) m = std::min(m, r.timestamp);
        return m;
      };
      CHECK(max_ts(parts[0][user]) <= min_ts(parts[1][user]));
      CHECK(max_ts(parts[1][user]) <= min_ts(parts[2][user]));
      CHECK(max_ts(parts[2][user]) == max_ts(rows));
    }
    CHECK(s.dropped_users == dropped);
  }
}
