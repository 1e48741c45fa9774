#include <benchmark/benchmark.h>

#include <vector>

#include <drugrec/resample.hpp>
#include <drugrec/rng.hpp>

namespace {

using namespace drugrec;

DenseDataset imbalanced(std::size_t rows, std::size_t dims) {
  Rng rng(11);
  DenseMatrix m;
  std::vector<Sentiment> labels;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> x(dims);
    for (auto& v : x) v = rng.uniform(-1, 1);
    m.append(x);
    labels.push_back(i % 10 < 3 ? Sentiment::negative : Sentiment::positive);
  }
  return DenseDataset::original(std::move(m), std::move(labels));
}

void BM_SmoteDense(benchmark::State& state) {
  const auto data = imbalanced(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  SmoteConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(smote(data, cfg));
}
BENCHMARK(BM_SmoteDense)->Args({2000, 8})->Args({8000, 8})->Args({2000, 100})->Unit(benchmark::kMillisecond);

}  // namespace
