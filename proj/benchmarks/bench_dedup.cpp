#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fedqa/dedup.hpp"

namespace {

std::vector<fedqa::taxonomy::ScholarlyRecord> records(std::size_t n) {
  std::vector<fedqa::taxonomy::ScholarlyRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    fedqa::taxonomy::ScholarlyRecord r;
    r.facet = fedqa::taxonomy::Facet::kArticle;
    // every third record repeats its predecessor's title
    const std::size_t id = i % 3 == 2 ? i - 1 : i;
    r.title = std::to_string(id * 7919 % 10007) + " retrieval study";
    r.authors = {"Author " + std::to_string(id % 97)};
    r.abstract = "abstract text for work " + std::to_string(id);
    out.push_back(std::move(r));
  }
  return out;
}

void BM_Deduplicate(benchmark::State& state) {
  const auto input = records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fedqa::dedup::deduplicate(input));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Deduplicate)->Arg(100)->Arg(1000);

}  // namespace
