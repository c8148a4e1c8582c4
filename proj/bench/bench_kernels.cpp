// Serial reference against the OpenMP kernel for each batch stage. The
// argument is the thread count given to the parallel variant.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "poicalib/batch.hpp"
#include "poicalib/bpr.hpp"
#include "poicalib/calibration.hpp"
#include "poicalib/lore.hpp"
#include "poicalib/metrics.hpp"
#include "poicalib/synthetic.hpp"
#include "poicalib/usg.hpp"

using namespace poicalib;

namespace {

struct World {
  SplitDataset split;
  std::shared_ptr<const TrainData> data;
  PopularityIndex index;
  std::vector<PopularityDistribution> profiles;
  std::unique_ptr<BprModel> bpr;
  std::unique_ptr<LoreModel> lore;
  std::vector<ScoredList> lists;
  std::vector<PopularityDistribution> targets;
  std::vector<double> lambdas;
  std::vector<EvaluationCase> cases;

  World() {
    SyntheticConfig sc;
    split = temporal_split(generate_synthetic(sc));
    data = TrainData::from_log(split.train);
    index = PopularityIndex::build(split.train);
    profiles = profile_distributions(split.train, index);
    BprConfig bc;
    bc.epochs = 20;
    bpr = std::make_unique<BprModel>(BprModel::fit(data, bc, 7));
    lore = std::make_unique<LoreModel>(data, LoreConfig{});
    lists = serial::recommend_all(*bpr, kBaseListSize);
    std::map<std::string, std::vector<std::string>> relevant;
    for (const auto& r : split.test.interactions()) relevant[r.user_id].push_back(r.item_id);
    for (const auto& l : lists) {
      targets.push_back(profiles[index.users().at(l.user_id)]);
      lambdas.push_back(0.5);
      std::vector<std::string> top(l.item_ids());
      top.resize(10);
      cases.push_back({l.user_id, top, relevant[l.user_id]});
    }
  }
};

const World& world() {
  static const World w;
  return w;
}

void BM_recommend_bpr_serial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(serial::recommend_all(*w.bpr, kBaseListSize));
}
void BM_recommend_bpr_omp(benchmark::State& state) {
  const auto& w = world();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(recommend_all(*w.bpr, kBaseListSize));
}

void BM_recommend_lore_serial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(serial::recommend_all(*w.lore, kBaseListSize));
}
void BM_recommend_lore_omp(benchmark::State& state) {
  const auto& w = world();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(recommend_all(*w.lore, kBaseListSize));
}

void BM_rerank_serial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::rerank_all(w.lists, w.targets, w.lambdas, 10, w.index, "cp"));
}
void BM_rerank_omp(benchmark::State& state) {
  const auto& w = world();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(rerank_all(w.lists, w.targets, w.lambdas, 10, w.index, "cp"));
}

void BM_evaluate_serial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::evaluate_users(w.cases, w.split.train, w.index));
}
void BM_evaluate_omp(benchmark::State& state) {
  const auto& w = world();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_users(w.cases, w.split.train, w.index));
}

void BM_neighbors_serial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state) benchmark::DoNotOptimize(serial::cosine_neighbors(*w.data, 50));
}
void BM_neighbors_omp(benchmark::State& state) {
  const auto& w = world();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cosine_neighbors(*w.data, 50));
}

void BM_objective_serial(benchmark::State& state) {
  const auto& w = world();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        serial::bpr_objective(*w.data, w.bpr->user_factors(), w.bpr->item_factors(), 0.01));
}
void BM_objective_omp(benchmark::State& state) {
  const auto& w = world();
  set_thread_count(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bpr_objective(*w.data, w.bpr->user_factors(), w.bpr->item_factors(), 0.01));
}

}  // namespace

BENCHMARK(BM_recommend_bpr_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_recommend_bpr_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_recommend_lore_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_recommend_lore_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rerank_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rerank_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_neighbors_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_neighbors_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_objective_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_objective_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
