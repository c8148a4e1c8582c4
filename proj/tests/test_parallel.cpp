#include <doctest.h>

#include <map>

#include "poicalib/batch.hpp"
#include "poicalib/bpr.hpp"
#include "poicalib/lore.hpp"
#include "poicalib/metrics.hpp"
#include "poicalib/usg.hpp"
#include "support.hpp"

using namespace poicalib;

namespace {

struct Fixture {
  SplitDataset split;
  std::shared_ptr<const TrainData> data;
  PopularityIndex index;
  std::vector<PopularityDistribution> profiles;

  explicit Fixture(std::uint64_t seed)
      : split(temporal_split(deduplicate(testing::random_log(seed, 80, 400)))),
        data(TrainData::from_log(split.train)),
        index(PopularityIndex::build(split.train)),
        profiles(profile_distributions(split.train, index)) {}
};

struct ThreadGuard {
  ~ThreadGuard() { set_thread_count(1); }
};

void check_users_equal(const std::vector<UserMetrics>& a, const std::vector<UserMetrics>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].user_id == b[i].user_id);
    CHECK(a[i].group == b[i].group);
    CHECK(a[i].ndcg == b[i].ndcg);
    CHECK(a[i].arp == b[i].arp);
    CHECK(a[i].poplift == b[i].poplift);
    CHECK(a[i].jsd == b[i].jsd);
  }
}

}  // namespace

TEST_CASE("recommend_all equals the serial loop") {
  ThreadGuard guard;
  Fixture f(3);
  BprConfig c;
  c.epochs = 15;
  auto bpr = BprModel::fit(f.data, c, 5);
  auto usg = UsgModel::fit(f.data, {});
  LoreModel lore(f.data, {});
  auto excluded = f.data->project(f.split.validation);
  for (const Recommender* m : {static_cast<const Recommender*>(&bpr),
                               static_cast<const Recommender*>(&usg),
                               static_cast<const Recommender*>(&lore)}) {
    const auto reference = serial::recommend_all(*m, 150, &excluded);
    for (int threads : {1, 2, 4}) {
      set_thread_count(threads);
      CHECK(recommend_all(*m, 150, &excluded) == reference);
    }
  }
}

TEST_CASE("rerank_all equals the serial loop") {
  ThreadGuard guard;
  Fixture f(5);
  auto lore = LoreModel(f.data, {});
  auto lists = recommend_all(lore, 100);
  std::vector<PopularityDistribution> targets;
  std::vector<double> lambdas;
  for (std::size_t u = 0; u < lists.size(); ++u) {
    targets.push_back(f.profiles[f.index.users().at(lists[u].user_id)]);
    lambdas.push_back(static_cast<double>(u % 11) / 10.0);
  }
  const auto reference = serial::rerank_all(lists, targets, lambdas, 10, f.index, "cp_h");
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    CHECK(rerank_all(lists, targets, lambdas, 10, f.index, "cp_h") == reference);
  }
}

TEST_CASE("evaluate_users equals the serial loop") {
  ThreadGuard guard;
  Fixture f(7);
  LoreModel lore(f.data, {});
  auto lists = recommend_all(lore, 10);
  std::map<std::string, std::vector<std::string>> relevant;
  for (const auto& r : f.split.test.interactions()) relevant[r.user_id].push_back(r.item_id);
  std::vector<EvaluationCase> cases;
  for (const auto& l : lists) cases.push_back({l.user_id, l.item_ids(), relevant[l.user_id]});
  const auto reference = serial::evaluate_users(cases, f.split.train, f.index);
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    check_users_equal(evaluate_users(cases, f.split.train, f.index), reference);
  }
}

TEST_CASE("cosine_neighbors equals the serial loop") {
  ThreadGuard guard;
  for (std::uint64_t seed : {1, 2, 9}) {
    Fixture f(seed);
    const auto reference = serial::cosine_neighbors(*f.data, 50);
    for (int threads : {1, 2, 4}) {
      set_thread_count(threads);
      CHECK(cosine_neighbors(*f.data, 50) == reference);
    }
  }
}

TEST_CASE("bpr objective equals the serial sum") {
  ThreadGuard guard;
  Fixture f(11);
  BprConfig c;
  c.epochs = 5;
  auto model = BprModel::fit(f.data, c, 2);
  const double reference =
      serial::bpr_objective(*f.data, model.user_factors(), model.item_factors(), 0.01);
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    CHECK(bpr_objective(*f.data, model.user_factors(), model.item_factors(), 0.01) == reference);
  }
}

TEST_CASE("training and lambda selection ignore the thread count") {
  ThreadGuard guard;
  Fixture f(13);
  BprConfig c;
  c.epochs = 10;
  c.objective_every = 5;
  set_thread_count(1);
  auto one = BprModel::fit(f.data, c, 4);
  auto lists = recommend_all(one, 50);
  std::map<std::string, std::vector<std::string>> relevant;
  for (const auto& r : f.split.validation.interactions()) relevant[r.user_id].push_back(r.item_id);
  std::vector<ValidationCase> cases;
  for (const auto& l : lists)
    cases.push_back({&l, f.profiles[f.index.users().at(l.user_id)], relevant[l.user_id]});
  const auto grid = CalibrationConfig::default_lambda_grid(0.1);
  auto sel_one = select_lambda(CalibrationMethod::cp_h, grid, cases, f.index);

  set_thread_count(4);
  auto four = BprModel::fit(f.data, c, 4);
  CHECK(four.user_factors() == one.user_factors());
  CHECK(four.item_factors() == one.item_factors());
  CHECK(four.objective_trace() == one.objective_trace());
  auto sel_four = select_lambda(CalibrationMethod::cp_h, grid, cases, f.index);
  CHECK(sel_four.lambda == sel_one.lambda);
  REQUIRE(sel_four.table.size() == sel_one.table.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(sel_four.table[g].accuracy == sel_one.table[g].accuracy);
    CHECK(sel_four.table[g].calibration == sel_one.table[g].calibration);
  }
}
