#include "delenox/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "delenox/error.hpp"

namespace delenox {

Individual make_individual(CppnGenome genome, SpriteShape shape) {
  Sprite sprite = render(genome, shape);
  FeasibilityReport report = feasibility(sprite);
  const double fitness = report.f_inf;
  return Individual{std::move(genome), std::move(sprite), report, std::nullopt, fitness};
}

void SearchParams::validate() const {
  if (total_population < 2) throw ContractViolation("total population must be at least 2");
  if (generations < 0) throw ContractViolation("generation count must be non-negative");
  if (k < 1) throw ContractViolation("k must be at least 1");
  if (l < 0) throw ContractViolation("l must be non-negative");
  if (elites_out < 0) throw ContractViolation("elites_out must be non-negative");
  mutation.validate();
}

double novelty_score(const Features& self, std::span<const Features* const> neighbours, int k,
                     double lonely) {
  if (neighbours.empty()) return lonely;
  std::vector<double> distances;
  distances.reserve(neighbours.size());
  for (const Features* other : neighbours) distances.push_back((self - *other).norm());
  const auto count = std::min(neighbours.size(), static_cast<std::size_t>(k));
  std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(count),
                    distances.end());
  const double sum = std::accumulate(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(count), 0.0);
  return sum / static_cast<double>(count);
}

double rho(std::size_t self, std::span<const Features> population, const NoveltyArchive& archive, int k) {
  std::vector<const Features*> neighbours;
  neighbours.reserve(population.size() + archive.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (i != self) neighbours.push_back(&population[i]);
  }
  for (const ArchiveEntry& entry : archive.entries) neighbours.push_back(&entry.features);
  const double lonely = std::sqrt(static_cast<double>(population[self].size()));
  return novelty_score(population[self], neighbours, k, lonely);
}

std::size_t roulette_select(std::span<const double> fitness, Rng& rng) {
  if (fitness.empty()) throw ContractViolation("roulette selection over an empty population");
  const double total = std::accumulate(fitness.begin(), fitness.end(), 0.0);
  if (!(total > 0.0)) return uniform_index(rng, fitness.size());
  const double ticket = uniform(rng, 0.0, total);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    cumulative += fitness[i];
    if (ticket < cumulative) return i;
  }
  // Rounding can leave the ticket just past the final boundary.
  for (std::size_t i = fitness.size(); i-- > 0;) {
    if (fitness[i] > 0.0) return i;
  }
  return fitness.size() - 1;
}

GenerationLog evaluate_population(SearchState& state, const SearchParams& params,
                                  const DenoisingAutoencoder& encoder) {
  std::vector<Features> features;
  features.reserve(state.feasible.size());
  for (Individual& ind : state.feasible) {
    if (!ind.features) ind.features = encode(encoder, half_input(ind.sprite));
    features.push_back(*ind.features);
  }

  GenerationLog log;
  log.generation = state.generation;
  log.n_feasible = static_cast<int>(state.feasible.size());
  for (std::size_t i = 0; i < state.feasible.size(); ++i) {
    const double score = rho(i, features, state.archive, params.k);
    state.feasible[i].fitness = score;
    log.mean_rho += score;
    log.max_rho = std::max(log.max_rho, score);
  }
  if (!state.feasible.empty()) log.mean_rho /= static_cast<double>(state.feasible.size());
  for (Individual& ind : state.infeasible) ind.fitness = ind.report.f_inf;
  log.archive_size = static_cast<int>(state.archive.size());
  return log;
}

namespace {

std::vector<std::size_t> rank_by_fitness(const std::vector<Individual>& population) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return population[a].fitness > population[b].fitness;
  });
  return order;
}

std::vector<double> fitness_of(const std::vector<Individual>& population) {
  std::vector<double> out;
  out.reserve(population.size());
  for (const Individual& ind : population) out.push_back(ind.fitness);
  return out;
}

}  // namespace

GenerationLog step_generation(SearchState& state, const SearchParams& params,
                              const DenoisingAutoencoder& encoder, Rng& rng) {
  const std::size_t current = state.population();
  if (current == 0) throw ContractViolation("both populations are empty");

  GenerationLog log = evaluate_population(state, params, encoder);

  const auto ranked = rank_by_fitness(state.feasible);
  const std::size_t inserts = std::min(ranked.size(), static_cast<std::size_t>(params.l));
  for (std::size_t i = 0; i < inserts; ++i) {
    const Individual& ind = state.feasible[ranked[i]];
    state.archive.entries.push_back({*ind.features, ind.genome});
  }
  log.archive_size = static_cast<int>(state.archive.size());

  const std::size_t total = static_cast<std::size_t>(params.total_population);
  const std::size_t n_feasible = state.feasible.size();
  // Share of offspring proportional to population size, rounded half up.
  const std::size_t feasible_quota = (2 * total * n_feasible + current) / (2 * current);

  std::vector<Individual> next_feasible;
  std::vector<Individual> next_infeasible;
  auto breed = [&](const std::vector<Individual>& parents, std::size_t count) {
    if (parents.empty() || count == 0) return;
    const std::vector<double> fitness = fitness_of(parents);
    for (std::size_t i = 0; i < count; ++i) {
      const Individual& parent = parents[roulette_select(fitness, rng)];
      Individual child = make_individual(mutate(parent.genome, params.mutation, rng), params.shape);
      (child.feasible() ? next_feasible : next_infeasible).push_back(std::move(child));
    }
  };
  breed(state.feasible, feasible_quota);
  breed(state.infeasible, total - feasible_quota);

  state.feasible = std::move(next_feasible);
  state.infeasible = std::move(next_infeasible);
  ++state.generation;
  return log;
}

SearchState initial_state(std::span<const CppnGenome> initial_genomes, const SearchParams& params,
                          Rng& rng) {
  if (initial_genomes.empty()) throw ContractViolation("exploration needs at least one initial genome");
  SearchState state;
  for (std::size_t i = 0; i < static_cast<std::size_t>(params.total_population); ++i) {
    const CppnGenome& source = initial_genomes[i % initial_genomes.size()];
    Individual ind = make_individual(i < initial_genomes.size() ? source : mutate(source, params.mutation, rng),
                                     params.shape);
    (ind.feasible() ? state.feasible : state.infeasible).push_back(std::move(ind));
  }
  return state;
}

ExplorationResult run_exploration(const DenoisingAutoencoder& encoder, const SearchParams& params,
                                  std::span<const CppnGenome> initial_genomes, Rng& rng) {
  params.validate();
  if (encoder.inputs() != params.shape.half_size()) {
    throw ContractViolation("encoder input size does not match the sprite shape");
  }
  ExplorationResult result;
  SearchState state = initial_state(initial_genomes, params, rng);
  for (int g = 0; g < params.generations; ++g) {
    result.log.push_back(step_generation(state, params, encoder, rng));
  }
  result.log.push_back(evaluate_population(state, params, encoder));

  const auto ranked = rank_by_fitness(state.feasible);
  const std::size_t count = std::min(ranked.size(), static_cast<std::size_t>(params.elites_out));
  for (std::size_t i = 0; i < count; ++i) result.elites.push_back(state.feasible[ranked[i]]);
  result.starved = state.feasible.empty();
  result.archive = std::move(state.archive);
  return result;
}

}  // namespace delenox
