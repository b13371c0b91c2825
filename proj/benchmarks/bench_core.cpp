#include <benchmark/benchmark.h>

#include <vector>

#include "delenox/autoencoder.hpp"
#include "delenox/cppn.hpp"
#include "delenox/novelty.hpp"
#include "delenox/sprite.hpp"

using namespace delenox;

namespace {

constexpr SpriteShape kShape{49, 49};

CppnGenome grown(std::uint64_t seed, int depth) {
  Rng rng(seed);
  CppnGenome g = random_minimal(rng);
  for (int i = 0; i < depth; ++i) g = mutate(g, MutationParams{0.3, 0.4, 0.3, 0.5}, rng);
  return g;
}

std::vector<std::vector<double>> sprite_inputs(std::size_t n) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(half_input(render(grown(i, 20), kShape)));
  return out;
}

DenoisingAutoencoder trained_shape(int features) {
  TrainConfig config;
  config.epochs = 0;
  config.features = features;
  return train(sprite_inputs(1), config).model;
}

void BM_Render(benchmark::State& state) {
  const CppnGenome g = grown(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render(g, kShape));
}
BENCHMARK(BM_Render)->Arg(0)->Arg(20)->Arg(60);

void BM_Feasibility(benchmark::State& state) {
  const Sprite s = render(grown(2, 30), kShape);
  for (auto _ : state) benchmark::DoNotOptimize(feasibility(s));
}
BENCHMARK(BM_Feasibility);

void BM_Mutate(benchmark::State& state) {
  const CppnGenome g = grown(3, 30);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(mutate(g, MutationParams{}, rng));
}
BENCHMARK(BM_Mutate);

void BM_Encode(benchmark::State& state) {
  const auto da = trained_shape(64);
  const auto input = sprite_inputs(1).front();
  for (auto _ : state) benchmark::DoNotOptimize(encode(da, input));
}
BENCHMARK(BM_Encode);

void BM_TrainEpoch(benchmark::State& state) {
  const auto data = sprite_inputs(static_cast<std::size_t>(state.range(0)));
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Rho(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Features> pop(n, Features(64));
  for (auto& f : pop) {
    for (int d = 0; d < 64; ++d) f(d) = uniform(rng, 0.0, 1.0);
  }
  const NoveltyArchive archive;
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i) benchmark::DoNotOptimize(rho(i, pop, archive, 20));
  }
}
BENCHMARK(BM_Rho)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_StepGeneration(benchmark::State& state) {
  SearchParams params;
  params.total_population = static_cast<int>(state.range(0));
  const auto encoder = trained_shape(64);
  Rng rng(5);
  std::vector<CppnGenome> seeds;
  for (int i = 0; i < params.total_population; ++i) seeds.push_back(random_minimal(rng));
  SearchState initial = initial_state(seeds, params, rng);
  for (auto _ : state) {
    state.PauseTiming();
    SearchState s = initial;
    state.ResumeTiming();
    benchmark::DoNotOptimize(step_generation(s, params, encoder, rng));
  }
}
BENCHMARK(BM_StepGeneration)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
