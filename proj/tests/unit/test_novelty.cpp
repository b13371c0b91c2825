#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "delenox/error.hpp"
#include "delenox/novelty.hpp"

using namespace delenox;
using delenox::testing::random_encoder;

namespace {

Features point(std::initializer_list<double> values) {
  Features f(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) f(i++) = v;
  return f;
}

std::vector<double> as_vector(const Features& f) { return {f.data(), f.data() + f.size()}; }

std::vector<CppnGenome> minimal_genomes(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CppnGenome> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_minimal(rng));
  return out;
}

SearchParams small_params() {
  SearchParams p;
  p.total_population = 60;
  p.generations = 5;
  return p;
}

}  // namespace

TEST_CASE("k nearest of {0.3, 0.4, 0.9} around 0 with k=2 is 0.35") {
  Features self = point({0.0});
  Features a = point({0.3}), b = point({0.9}), c = point({0.4});
  std::vector<const Features*> n = {&a, &b, &c};
  CHECK(novelty_score(self, n, 2, 99.0) == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("identical features score zero; no neighbours score the sentinel") {
  std::vector<Features> pop(5, point({0.2, 0.7, 0.1}));
  NoveltyArchive archive;
  archive.entries.push_back({point({0.2, 0.7, 0.1}), minimal_genomes(1, 1)[0]});
  for (std::size_t i = 0; i < pop.size(); ++i) CHECK(rho(i, pop, archive, 20) == 0.0);

  std::vector<Features> lone(1, point({0.1, 0.2, 0.3, 0.4}));
  CHECK(rho(0, lone, NoveltyArchive{}, 20) == 2.0);  // sqrt(4)
}

TEST_CASE("fewer than k neighbours averages over all of them") {
  std::vector<Features> pop = {point({0.0}), point({1.0}), point({3.0})};
  CHECK(rho(0, pop, NoveltyArchive{}, 20) == 2.0);
}

TEST_CASE("rho equals the exhaustive oracle on random pools") {
  Rng rng(404);
  const auto genome = minimal_genomes(1, 2)[0];
  for (int pool = 0; pool < 500; ++pool) {
    const std::size_t n = 1 + uniform_index(rng, 300);
    const std::size_t archived = uniform_index(rng, 40);
    const int dims = 1 + static_cast<int>(uniform_index(rng, 64));
    std::vector<Features> pop(n, Features(dims));
    for (auto& f : pop) {
      for (int d = 0; d < dims; ++d) f(d) = uniform(rng, 0.0, 1.0);
    }
    NoveltyArchive archive;
    for (std::size_t a = 0; a < archived; ++a) {
      Features f(dims);
      for (int d = 0; d < dims; ++d) f(d) = uniform(rng, 0.0, 1.0);
      archive.entries.push_back({f, genome});
    }
    const std::size_t self = uniform_index(rng, n);
    std::vector<std::vector<double>> others;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != self) others.push_back(as_vector(pop[i]));
    }
    for (const auto& e : archive.entries) others.push_back(as_vector(e.features));
    const double expected = oracle::rho(as_vector(pop[self]), others, 20, std::sqrt(static_cast<double>(dims)));
    REQUIRE(std::fabs(rho(self, pop, archive, 20) - expected) < 1e-12);
  }
}

TEST_CASE("roulette draws 0.9 about nine times as often as 0.1") {
  Rng rng(8);
  const std::vector<double> fitness = {0.9, 0.1};
  int counts[2] = {0, 0};
  for (int i = 0; i < 100000; ++i) ++counts[roulette_select(fitness, rng)];
  const double ratio = static_cast<double>(counts[0]) / counts[1];
  CHECK(ratio > 8.5);
  CHECK(ratio < 9.5);
}

TEST_CASE("roulette frequencies pass a chi-square test") {
  Rng rng(99);
  const std::vector<double> fitness = {0.5, 0.1, 0.0, 0.25, 0.15};
  const int draws = 20000;
  std::vector<int> counts(fitness.size(), 0);
  for (int i = 0; i < draws; ++i) ++counts[roulette_select(fitness, rng)];
  CHECK(counts[2] == 0);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (fitness[i] == 0.0) continue;
    const double expected = fitness[i] * draws;
    chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  CHECK(chi2 < 16.27);  // 3 degrees of freedom, p = 0.001
}

TEST_CASE("roulette over all-zero fitness is uniform") {
  Rng rng(5);
  const std::vector<double> fitness(4, 0.0);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i) ++counts[roulette_select(fitness, rng)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 600);
  CHECK_THROWS_AS(roulette_select(std::vector<double>{}, rng), ContractViolation);
}

TEST_CASE("a generation conserves population size and grows the archive by l") {
  const SearchParams params = small_params();
  const auto encoder = random_encoder(16, params.shape.half_size(), 3);
  const auto genomes = minimal_genomes(static_cast<std::size_t>(params.total_population), 77);
  Rng rng(1);
  SearchState state = initial_state(genomes, params, rng);
  CHECK(state.population() == 60);
  CHECK(state.archive.empty());
  REQUIRE(state.feasible.size() >= 5);
  for (int g = 0; g < 10; ++g) {
    const std::size_t archive_before = state.archive.size();
    const std::size_t feasible_before = state.feasible.size();
    GenerationLog log = step_generation(state, params, encoder, rng);
    CHECK(log.generation == g);
    CHECK(state.generation == g + 1);
    CHECK(state.population() == 60);
    CHECK(state.archive.size() == archive_before + std::min<std::size_t>(5, feasible_before));
    for (const auto& ind : state.feasible) CHECK(ind.feasible());
    for (const auto& ind : state.infeasible) CHECK_FALSE(ind.feasible());
  }
}

TEST_CASE("evaluation assigns rho to feasible and f_inf to infeasible individuals") {
  const SearchParams params = small_params();
  const auto encoder = random_encoder(8, params.shape.half_size(), 4);
  Rng rng(2);
  SearchState state = initial_state(minimal_genomes(60, 12), params, rng);
  GenerationLog log = evaluate_population(state, params, encoder);
  std::vector<Features> features;
  for (const auto& ind : state.feasible) features.push_back(*ind.features);
  double max_rho = 0.0;
  for (std::size_t i = 0; i < state.feasible.size(); ++i) {
    CHECK(state.feasible[i].fitness == rho(i, features, state.archive, params.k));
    CHECK(state.feasible[i].fitness >= 0.0);
    max_rho = std::max(max_rho, state.feasible[i].fitness);
  }
  for (const auto& ind : state.infeasible) CHECK(ind.fitness == ind.report.f_inf);
  CHECK(log.max_rho == max_rho);
  CHECK(log.n_feasible == static_cast<int>(state.feasible.size()));
}

TEST_CASE("initial state uses the given genomes first, then mutated copies") {
  SearchParams params = small_params();
  const auto genomes = minimal_genomes(7, 3);
  Rng rng(4);
  SearchState state = initial_state(genomes, params, rng);
  CHECK(state.population() == 60);
  std::map<std::string, int> seen;
  for (const auto* pop : {&state.feasible, &state.infeasible}) {
    for (const auto& ind : *pop) ++seen[serialize(ind.genome)];
  }
  for (const auto& g : genomes) CHECK(seen[serialize(g)] >= 1);
}

TEST_CASE("zero generations ranks the initial feasible population") {
  SearchParams params = small_params();
  params.generations = 0;
  const auto encoder = random_encoder(16, params.shape.half_size(), 5);
  const auto genomes = minimal_genomes(60, 21);
  Rng rng(6);
  ExplorationResult r = run_exploration(encoder, params, genomes, rng);
  CHECK(r.log.size() == 1);
  CHECK(r.archive.empty());

  Rng replay(6);
  SearchState state = initial_state(genomes, params, replay);
  evaluate_population(state, params, encoder);
  std::vector<double> scores;
  for (const auto& ind : state.feasible) scores.push_back(ind.fitness);
  std::sort(scores.rbegin(), scores.rend());
  REQUIRE(r.elites.size() == std::min<std::size_t>(10, scores.size()));
  for (std::size_t i = 0; i < r.elites.size(); ++i) CHECK(r.elites[i].fitness == scores[i]);
}

TEST_CASE("exploration returns ranked feasible elites and replays from the seed") {
  const SearchParams params = small_params();
  const auto encoder = random_encoder(16, params.shape.half_size(), 7);
  const auto genomes = minimal_genomes(60, 8);
  Rng a(9), b(9);
  ExplorationResult ra = run_exploration(encoder, params, genomes, a);
  ExplorationResult rb = run_exploration(encoder, params, genomes, b);
  CHECK(ra.log.size() == static_cast<std::size_t>(params.generations) + 1);
  CHECK_FALSE(ra.starved);
  REQUIRE(ra.elites.size() == rb.elites.size());
  CHECK(ra.elites.size() <= 10);
  for (std::size_t i = 0; i < ra.elites.size(); ++i) {
    CHECK(serialize(ra.elites[i].genome) == serialize(rb.elites[i].genome));
    CHECK(ra.elites[i].feasible());
    CHECK(ra.elites[i].report.f_inf == 1.0);
    if (i > 0) CHECK(ra.elites[i - 1].fitness >= ra.elites[i].fitness);
  }
  for (std::size_t g = 1; g < ra.log.size(); ++g) CHECK(ra.log[g].archive_size >= ra.log[g - 1].archive_size);
}

TEST_CASE("exploration rejects an encoder of the wrong size") {
  const SearchParams params = small_params();
  const auto encoder = random_encoder(4, 100, 1);
  Rng rng(1);
  CHECK_THROWS_AS(run_exploration(encoder, params, minimal_genomes(3, 1), rng), ContractViolation);
}
