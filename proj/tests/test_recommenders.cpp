#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "poicalib/batch.hpp"
#include "poicalib/bpr.hpp"
#include "poicalib/error.hpp"
#include "poicalib/lore.hpp"
#include "poicalib/rng.hpp"
#include "poicalib/usg.hpp"
#include "support.hpp"

using namespace poicalib;
using testing::make_log;

namespace {

std::shared_ptr<const TrainData> train_of(const InteractionLog& log) {
  return TrainData::from_log(log);
}

std::shared_ptr<const TrainData> synthetic_train(std::uint64_t seed = 42) {
  SyntheticConfig c;
  c.seed = seed;
  return TrainData::from_log(temporal_split(generate_synthetic(c)).train);
}

// Great-circle distance, written out independently of the library.
double great_circle(double lat1, double lon1, double lat2, double lon2) {
  const double r = M_PI / 180.0;
  const double a = std::pow(std::sin((lat2 - lat1) * r / 2), 2) +
                   std::cos(lat1 * r) * std::cos(lat2 * r) * std::pow(std::sin((lon2 - lon1) * r / 2), 2);
  return 2 * 6371.0 * std::asin(std::sqrt(a));
}

std::vector<double> minmax(std::vector<double> v) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  for (auto& x : v) x = hi > lo ? (x - lo) / (hi - lo) : (hi > 0 ? 1.0 : 0.0);
  return v;
}

}  // namespace

// --- BPR ---------------------------------------------------------------------

TEST_CASE("bpr separates a toy preference") {
  auto data = train_of(make_log({{"u1", "A", 1}, {"u2", "B", 1}}));
  BprConfig c;
  c.dim = 8;
  c.batch_size = 1;
  auto model = BprModel::fit(data, c, 3);
  CHECK(model.score("u1", "A") > model.score("u1", "B"));
  CHECK(model.score("u2", "B") > model.score("u2", "A"));
}

TEST_CASE("bpr zero epochs and zero init scores everything 0") {
  auto data = synthetic_train();
  BprConfig c;
  c.epochs = 0;
  c.init_std = 0.0;
  auto model = BprModel::fit(data, c, 1);
  for (UserIndex u = 0; u < 5; ++u)
    for (ItemIndex i = 0; i < 20; ++i) CHECK(model.score(u, i) == 0.0);
  // equal scores fall back to item id order
  auto list = top_m(model, 0, 5);
  auto ids = list.item_ids();
  CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("bpr is deterministic for a seed") {
  auto data = synthetic_train();
  BprConfig c;
  c.epochs = 5;
  auto a = BprModel::fit(data, c, 9);
  auto b = BprModel::fit(data, c, 9);
  CHECK(a.user_factors() == b.user_factors());
  CHECK(a.item_factors() == b.item_factors());
  auto other = BprModel::fit(data, c, 10);
  CHECK_FALSE(other.user_factors() == a.user_factors());
}

TEST_CASE("bpr score is the inner product") {
  auto data = train_of(make_log({{"u", "a", 1}, {"v", "b", 1}}));
  FactorMatrix users(2, 2), items(2, 2);
  users.row(0)[0] = 1.0;
  items.row(0)[0] = 1.0;
  items.row(1)[1] = 1.0;
  BprModel m(data, {}, users, items);
  CHECK(m.score("u", "a") == 1.0);
  CHECK(m.score("u", "b") == 0.0);
  CHECK_THROWS_AS(m.score("nobody", "a"), Error);

  Rng rng(1);
  auto big = synthetic_train();
  FactorMatrix U(big->users.size(), 7), H(big->items.size(), 7);
  for (auto& x : U.values()) x = rng.normal();
  for (auto& x : H.values()) x = rng.normal();
  BprModel r(big, {}, U, H);
  for (int k = 0; k < 50; ++k) {
    const auto u = static_cast<UserIndex>(rng.below(big->users.size()));
    const auto i = static_cast<ItemIndex>(rng.below(big->items.size()));
    double s = 0.0;
    for (std::size_t d = 0; d < 7; ++d) s += U.row(u)[d] * H.row(i)[d];
    CHECK(r.score(u, i) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("bpr objective rises during training") {
  auto data = synthetic_train();
  BprConfig c;
  c.objective_every = 20;
  auto model = BprModel::fit(data, c, 7);
  const auto& trace = model.objective_trace();
  REQUIRE(trace.size() == 11);
  std::size_t rises = 0;
  for (std::size_t k = 1; k < trace.size(); ++k) rises += trace[k].second >= trace[k - 1].second;
  CHECK(static_cast<double>(rises) >= 0.9 * static_cast<double>(trace.size() - 1));
  CHECK(trace.back().second > trace.front().second);
}

TEST_CASE("bpr divergence is a training error") {
  auto data = synthetic_train();
  BprConfig c;
  c.epochs = 50;
  c.init_std = 1.0;
  c.learning_rate = 1e200;
  try {
    BprModel::fit(data, c, 1);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::training);
  }
}

// --- USG ---------------------------------------------------------------------

TEST_CASE("cosine similarity") {
  auto data = train_of(make_log({{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 1}, {"b", "y", 2},
                                 {"c", "z", 1}}));
  CHECK(cosine_similarity(*data, 0, 1) == doctest::Approx(1.0));
  CHECK(cosine_similarity(*data, 0, 2) == 0.0);
  auto nb = cosine_neighbors(*data, 50);
  REQUIRE(nb[0].size() == 1);
  CHECK(nb[0][0].user == 1);
  CHECK(nb[2].empty());
}

TEST_CASE("power law fit recovers the exponent") {
  // Inverse-CDF draws from p(d) ~ d^-1.5 on [1, 1000].
  Rng rng(42);
  const double lo = 1.0, hi = 1000.0, e = -0.5;
  std::vector<double> d;
  for (int k = 0; k < 200000; ++k) {
    const double u = rng.uniform();
    d.push_back(std::pow(std::pow(lo, e) + u * (std::pow(hi, e) - std::pow(lo, e)), 1.0 / e));
  }
  auto law = fit_power_law(d, 100);
  CHECK(law.enabled);
  CHECK(law.b >= -1.65);
  CHECK(law.b <= -1.35);
  CHECK(law.a > 0.0);

  std::vector<double> one = {3.0, 3.0, 3.0};
  CHECK_FALSE(fit_power_law(one).enabled);
}

TEST_CASE("usg collaborative endpoints") {
  // u's neighbours v and w both visited t; nobody visited s besides x.
  auto data = train_of(make_log({{"u", "a", 1}, {"v", "a", 1}, {"v", "t", 2}, {"w", "a", 1},
                                 {"w", "t", 2}, {"x", "s", 1}}));
  UsgConfig c;
  c.beta = 0.0;
  UsgModel m(data, c, PowerLaw{});
  CHECK(m.score("u", "t") == 1.0);
  CHECK(m.score("u", "s") == 0.0);
  UsgConfig social;
  social.alpha = 0.2;
  CHECK_THROWS_AS(UsgModel(data, social, PowerLaw{}), Error);
}

TEST_CASE("usg beta=1 ranks by the naive Bayes product") {
  auto log = make_log({{"u", "h1", 1, 40.00, -74.00},
                       {"u", "h2", 2, 40.02, -74.01},
                       {"v", "h1", 1, 40.00, -74.00},
                       {"v", "c1", 2, 40.05, -74.00},
                       {"w", "c2", 1, 40.30, -74.20},
                       {"w", "c3", 2, 40.01, -73.99}});
  auto data = train_of(log);
  const PowerLaw law{0.8, -1.2, 0.01, true};
  UsgConfig c;
  c.beta = 1.0;
  UsgModel m(data, c, law);

  const auto& coords = log.item_coords();
  std::vector<std::pair<double, std::string>> oracle;
  for (const char* cand : {"c1", "c2", "c3"}) {
    double s = 0.0;
    for (const char* h : {"h1", "h2"}) {
      const auto& p = coords.at(cand);
      const auto& q = coords.at(h);
      s += std::log(std::max(0.8 * std::pow(great_circle(p.lat, p.lon, q.lat, q.lon), -1.2), 1e-12));
    }
    oracle.emplace_back(s, cand);
  }
  std::sort(oracle.rbegin(), oracle.rend());
  auto list = top_m(m, data->users.at("u"), 3);
  REQUIRE(list.entries.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) CHECK(list.entries[r].item_id == oracle[r].second);
  CHECK(list.entries.front().score == 1.0);
  CHECK(list.entries.back().score == 0.0);
}

TEST_CASE("usg extreme betas reduce to one component") {
  auto data = synthetic_train(5);
  const auto law = fit_power_law(within_user_distances(*data));
  REQUIRE(law.enabled);
  UsgConfig cf_only, geo_only;
  cf_only.beta = 0.0;
  geo_only.beta = 1.0;
  UsgModel a(data, cf_only, law), b(data, geo_only, law);
  for (UserIndex u = 0; u < 20; ++u) {
    auto cand = candidate_items(*data, u);
    std::vector<double> sa(cand.size()), sb(cand.size()), cf, geo;
    a.score(u, cand, sa);
    b.score(u, cand, sb);
    for (auto l : cand) {
      cf.push_back(a.collaborative(u, l));
      geo.push_back(b.geo_log_likelihood(u, l));
    }
    const double top = *std::max_element(geo.begin(), geo.end());
    for (auto& g : geo) g = std::exp(g - top);
    cf = minmax(cf);
    geo = minmax(geo);
    for (std::size_t k = 0; k < cand.size(); ++k) {
      CHECK(sa[k] == doctest::Approx(cf[k]).epsilon(1e-12));
      CHECK(sb[k] == doctest::Approx(geo[k]).epsilon(1e-12));
    }
  }
}

// --- LORE --------------------------------------------------------------------

TEST_CASE("transition graph rows") {
  auto ids = [](std::vector<int> v) { return std::vector<ItemIndex>(v.begin(), v.end()); };
  auto g = TransitionGraph::from_sequences(2, {ids({0, 1, 0})});
  CHECK(g.probability(0, 1) == 1.0);
  CHECK(g.probability(1, 0) == 1.0);
  auto h = TransitionGraph::from_sequences(3, {ids({0, 1}), ids({0, 2})});
  CHECK(h.probability(0, 1) == 0.5);
  CHECK(h.probability(0, 2) == 0.5);
  CHECK(h.targets(1).empty());
}

TEST_CASE("transition rows match a counting oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto data = TrainData::from_log(deduplicate(testing::random_log(seed)));
    auto g = TransitionGraph::from_sequences(data->items.size(), data->sequences);
    std::map<std::pair<ItemIndex, ItemIndex>, double> counts;
    std::map<ItemIndex, double> out;
    for (const auto& s : data->sequences)
      for (std::size_t k = 1; k < s.size(); ++k) counts[{s[k - 1], s[k]}] += 1, out[s[k - 1]] += 1;
    for (ItemIndex i = 0; i < data->items.size(); ++i) {
      double row = 0.0;
      for (auto p : g.probabilities(i)) row += p;
      if (out.count(i)) CHECK(std::abs(row - 1.0) < 1e-9);
      else CHECK(g.targets(i).empty());
    }
    for (const auto& [edge, c] : counts)
      CHECK(g.probability(edge.first, edge.second) == doctest::Approx(c / out[edge.first]));
  }
}

TEST_CASE("amc weights") {
  CHECK(amc_weights(1) == std::vector<double>{1.0});
  for (std::size_t n = 1; n <= 30; ++n) {
    auto w = amc_weights(n);
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double expect = std::pow(2.0, static_cast<double>(k) - static_cast<double>(n) - 1.0) /
                            (1.0 - std::pow(2.0, -static_cast<double>(n)));
      CHECK(w[k - 1] == doctest::Approx(expect).epsilon(1e-12));
      s += w[k - 1];
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("lore sequential term by hand") {
  // a: X Y   b: Y Z Y2   c: X Z
  auto data = train_of(make_log({{"a", "X", 1}, {"a", "Y", 2}, {"b", "Y", 1}, {"b", "Z", 2},
                                 {"b", "Y2", 3}, {"c", "X", 1}, {"c", "Z", 2}}));
  LoreModel m(data, {});
  const auto a = data->users.at("a");
  const auto X = data->items.at("X"), Y = data->items.at("Y"), Z = data->items.at("Z");
  CHECK(m.transitions().probability(X, Y) == 0.5);
  CHECK(m.transitions().probability(X, Z) == 0.5);
  CHECK(m.transitions().probability(Y, Z) == 1.0);
  // w = (1/3, 2/3) over (X, Y)
  CHECK(m.sequential(a, Z) == doctest::Approx(1.0 / 3 * 0.5 + 2.0 / 3 * 1.0));
  CHECK(m.sequential(a, X) == 0.0);

  auto single = train_of(make_log({{"s", "p", 1}, {"t", "p", 1}, {"t", "q", 2}, {"t", "r", 3}}));
  LoreModel one(single, {});
  const auto s = single->users.at("s");
  for (ItemIndex l = 0; l < single->items.size(); ++l)
    CHECK(one.sequential(s, l) == one.transitions().probability(single->sequences[s][0], l));
}

TEST_CASE("lore score is zero without inbound transitions") {
  auto data = train_of(make_log({{"u", "a", 1}, {"u", "b", 2}, {"v", "a", 1}, {"v", "c", 2},
                                 {"w", "d", 1}}));
  LoreModel m(data, {});
  CHECK(m.score("u", "d") == 0.0);
  CHECK(m.score("u", "c") > 0.0);
  CHECK(m.user_density(0).bandwidth_lat() >= 1e-4);
  CHECK(m.density(0, data->items.at("d")) >= 0.0);
}

// --- lists -------------------------------------------------------------------

TEST_CASE("top_m truncation and exclusion") {
  auto data = train_of(make_log({{"u", "a", 1}, {"v", "b", 1}, {"v", "c", 2}, {"v", "d", 3},
                                 {"v", "e", 4}, {"v", "f", 5}}));
  LoreModel m(data, {});
  bool is_short = false;
  auto list = top_m(m, data->users.at("u"), 150, {}, &is_short);
  CHECK(list.entries.size() == 5);
  CHECK(is_short);
  std::vector<ItemIndex> excluded = {data->items.at("b")};
  auto fewer = top_m(m, data->users.at("u"), 150, excluded);
  CHECK(fewer.entries.size() == 4);
}

TEST_CASE("train items never appear in any list") {
  auto data = synthetic_train();
  BprConfig bc;
  bc.epochs = 10;
  auto bpr = BprModel::fit(data, bc, 1);
  auto usg = UsgModel::fit(data, {});
  LoreModel lore(data, {});
  for (const Recommender* m : {static_cast<const Recommender*>(&bpr),
                               static_cast<const Recommender*>(&usg),
                               static_cast<const Recommender*>(&lore)}) {
    auto lists = recommend_all(*m, 150);
    REQUIRE(lists.size() == data->users.size());
    for (UserIndex u = 0; u < lists.size(); ++u) {
      std::set<std::string> ids;
      for (const auto& e : lists[u].entries) {
        CHECK_FALSE(data->has_seen(u, data->items.at(e.item_id)));
        ids.insert(e.item_id);
      }
      CHECK(ids.size() == lists[u].entries.size());
      CHECK(lists[u].entries.size() == 150);
      for (std::size_t r = 1; r < lists[u].entries.size(); ++r) {
        const auto& p = lists[u].entries[r - 1];
        const auto& q = lists[u].entries[r];
        CHECK((p.score > q.score || (p.score == q.score && p.item_id < q.item_id)));
      }
    }
  }
}
