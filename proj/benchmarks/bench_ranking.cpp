#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "fedqa/ranking.hpp"

namespace {

std::vector<fedqa::ranking::TokenList> corpus(std::size_t n, std::size_t vocab) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> term(0, vocab - 1);
  std::uniform_int_distribution<std::size_t> len(20, 200);
  std::vector<fedqa::ranking::TokenList> docs(n);
  for (auto& d : docs) {
    for (std::size_t i = len(rng); i > 0; --i) d.push_back("w" + std::to_string(term(rng)));
  }
  return docs;
}

void BM_BuildStats(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(fedqa::ranking::build_stats(docs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildStats)->Arg(100)->Arg(1000);

void BM_Bm25Score(benchmark::State& state) {
  const auto docs = corpus(static_cast<std::size_t>(state.range(0)), 2000);
  const auto stats = fedqa::ranking::build_stats(docs);
  const fedqa::ranking::TokenList query{"w1", "w17", "w300"};
  for (auto _ : state) {
    double total = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) total += fedqa::ranking::bm25plus_score(query, d, stats);
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Score)->Arg(100)->Arg(1000);

}  // namespace
