#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include <drugrec/corpus.hpp>
#include <drugrec/rng.hpp>
#include <drugrec/sparse_features.hpp>
#include <drugrec/textprep.hpp>

namespace {

using namespace drugrec;

std::vector<Tokens> random_docs(std::size_t n, std::size_t vocab, std::size_t length) {
  Rng rng(3);
  std::vector<Tokens> docs(n);
  for (auto& d : docs)
    for (std::size_t i = 0; i < length; ++i) d.push_back("w" + std::to_string(rng.uniform_index(vocab)));
  return docs;
}

void BM_PreprocessReview(benchmark::State& state) {
  ReviewRecord r;
  r.review_text =
      "&quot;I&#039;ve been taking this for three weeks and the headaches stopped. "
      "Side effects were mild, some nausea in the mornings, but it is working.&quot;";
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_review(r));
}
BENCHMARK(BM_PreprocessReview);

void BM_FitTfidf(benchmark::State& state) {
  const auto docs = random_docs(static_cast<std::size_t>(state.range(0)), 2000, 40);
  for (auto _ : state) benchmark::DoNotOptimize(fit_tfidf(docs, {1, 2}, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitTfidf)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TfidfTransform(benchmark::State& state) {
  const auto docs = random_docs(static_cast<std::size_t>(state.range(0)), 2000, 40);
  const auto model = fit_tfidf(docs, {1, 2}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(tfidf_matrix(docs, model));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TfidfTransform)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
