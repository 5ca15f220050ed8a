#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "reasonscore/alignment.hpp"
#include "reasonscore/config.hpp"
#include "reasonscore/meta_eval.hpp"
#include "reasonscore/providers.hpp"
#include "reasonscore/rng.hpp"
#include "reasonscore/scorer.hpp"

using namespace reasonscore;

namespace {

std::vector<std::string> sample_texts(std::size_t count) {
  std::vector<std::string> texts;
  SplitMix64 rng(1);
  for (std::size_t i = 0; i < count; ++i) {
    std::string text;
    const std::size_t words = 4 + rng.next_below(8);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) text += ' ';
      text += "word" + std::to_string(rng.next_below(500));
    }
    texts.push_back(text + ".");
  }
  return texts;
}

ReasoningChain sample_chain(std::size_t steps) {
  const auto source = sample_texts(3);
  const auto hypothesis = sample_texts(steps);
  const auto reference = sample_texts(steps);
  return ReasoningChain("bench", make_steps(source), make_steps(hypothesis),
                        make_steps(reference));
}

void BM_hash_embed_steps(benchmark::State& state) {
  HashEmbeddingProvider provider(static_cast<std::size_t>(state.range(0)), 7);
  const auto texts = sample_texts(32);
  for (auto _ : state) {
    auto vectors = provider.embed(texts, Granularity::kStep);
    benchmark::DoNotOptimize(vectors.data());
  }
}

void BM_align_vector(benchmark::State& state) {
  SplitMix64 rng(2);
  const std::size_t dim = 64;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  HashEmbeddingProvider provider(dim, 3);
  std::vector<UnitVector> sources, targets;
  for (std::size_t i = 0; i < n; ++i) {
    sources.push_back(provider.token_vector("s" + std::to_string(i)));
    targets.push_back(provider.token_vector("t" + std::to_string(i)));
  }
  for (auto _ : state) {
    auto av = align_vector(sources, targets);
    benchmark::DoNotOptimize(av.values.data());
  }
}

void BM_score_chain_all_metrics(benchmark::State& state) {
  RunConfig config;
  config.embedding.config.dim = 64;
  ChainScorer scorer(make_providers(config), {});
  const ReasoningChain chain = sample_chain(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto report = scorer.score(chain);
    benchmark::DoNotOptimize(&report);
  }
}

void BM_somers_d_permutation(benchmark::State& state) {
  SplitMix64 rng(3);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(static_cast<double>(rng.next_below(2)));
    y.push_back(rng.next_double());
  }
  SomersOptions options;
  options.permutations = 1000;
  for (auto _ : state) {
    auto result = somers_d(x, y, options);
    benchmark::DoNotOptimize(&result);
  }
}

}  // namespace

BENCHMARK(BM_hash_embed_steps)->Arg(32)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_align_vector)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_score_chain_all_metrics)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_somers_d_permutation)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
