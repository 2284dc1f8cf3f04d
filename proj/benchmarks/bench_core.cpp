#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "fibrank/dismantle.hpp"
#include "fibrank/metrics.hpp"
#include "fibrank/network.hpp"
#include "fibrank/rng.hpp"
#include "fibrank/stats.hpp"

using namespace fibrank;

namespace {

std::vector<std::uint64_t> random_counts(std::size_t n) {
  Rng rng(n);
  std::vector<std::uint64_t> counts(n);
  for (auto& c : counts) c = rng.pareto_int(1.8, 1, 100000);
  return counts;
}

void bm_fib_index(benchmark::State& state) {
  const auto counts = random_counts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fib_index(counts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_fib_index)->Arg(100)->Arg(10000)->Arg(1000000);

std::vector<LabeledRecord> random_records(std::size_t n_records) {
  Rng rng(n_records);
  std::vector<LabeledRecord> records;
  records.reserve(n_records);
  std::vector<std::pair<std::string, std::string>> originals;
  for (std::size_t i = 0; i < n_records; ++i) {
    LabeledRecord lr;
    lr.record.tweet_id = "t" + std::to_string(i);
    lr.record.author_id = "a" + std::to_string(rng.uniform_u64(n_records / 20 + 1));
    lr.record.timestamp = 1;
    lr.low_cred = true;
    if (originals.empty() || rng.uniform01() < 0.25) {
      originals.emplace_back(lr.record.tweet_id, lr.record.author_id);
    } else {
      const auto& [ot, oa] = originals[rng.uniform_index(originals.size())];
      if (oa != lr.record.author_id) lr.record.retweet_of = RetweetRef{ot, oa};
    }
    records.push_back(std::move(lr));
  }
  return records;
}

void bm_build_network(benchmark::State& state) {
  const auto records = random_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_network(records));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_build_network)->Arg(10000)->Arg(100000);

void bm_cvm_asymptotic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(n);
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (auto& v : x) v = rng.uniform01();
  for (auto& v : y) v = rng.uniform01();
  TestOptions options;
  options.method = PMethod::asymptotic;
  for (auto _ : state)
    benchmark::DoNotOptimize(cvm_two_sample(x, y, options).p_value);
}
BENCHMARK(bm_cvm_asymptotic)->Arg(100)->Arg(10000);

void bm_dismantling_curve(benchmark::State& state) {
  const auto records = random_records(static_cast<std::size_t>(state.range(0)));
  const auto net = build_network(records);
  const auto metrics = compute_metrics(records);
  std::vector<std::string> candidates;
  candidates.reserve(metrics.size());
  for (const auto& row : metrics) candidates.push_back(row.account_id);
  const auto ranking = optimal_ranking(net, candidates);
  for (auto _ : state)
    benchmark::DoNotOptimize(dismantling_curve(ranking, net).points.size());
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(candidates.size()));
}
BENCHMARK(bm_dismantling_curve)->Arg(10000)->Arg(100000);

} // namespace

BENCHMARK_MAIN();
