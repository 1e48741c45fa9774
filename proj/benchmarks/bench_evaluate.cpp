#include <benchmark/benchmark.h>

#include <vector>

#include <drugrec/evaluate.hpp>
#include <drugrec/rng.hpp>

namespace {

using namespace drugrec;

void BM_RocAuc(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<Sentiment> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.uniform_index(3) ? Sentiment::positive : Sentiment::negative;
    scores[i] = rng.uniform(-1, 1) + (labels[i] == Sentiment::positive ? 0.5 : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scores, labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(53036);

}  // namespace
