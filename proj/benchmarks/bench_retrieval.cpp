#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "fedqa/embedding.hpp"
#include "fedqa/retriever.hpp"

namespace {

std::vector<std::string> texts(std::size_t n) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> term(0, 999);
  std::vector<std::string> out(n);
  for (auto& t : out) {
    for (int i = 0; i < 40; ++i) t += "w" + std::to_string(term(rng)) + " ";
  }
  return out;
}

void BM_BuildKnowledgeBase(benchmark::State& state) {
  const fedqa::embedding::LocalHashEmbedder embedder(512);
  const auto docs = texts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fedqa::retriever::KnowledgeBase::from_texts(docs, embedder));
}
BENCHMARK(BM_BuildKnowledgeBase)->Arg(50)->Arg(200);

void BM_EnsembleRetrieve(benchmark::State& state) {
  const fedqa::embedding::LocalHashEmbedder embedder(512);
  const auto docs = texts(static_cast<std::size_t>(state.range(0)));
  const auto kb = fedqa::retriever::KnowledgeBase::from_texts(docs, embedder);
  const fedqa::retriever::EnsembleConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fedqa::retriever::ensemble_retrieve(docs[3], kb, cfg, embedder));
}
BENCHMARK(BM_EnsembleRetrieve)->Arg(50)->Arg(200);

}  // namespace
