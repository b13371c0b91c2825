#pragma once

#include <optional>
#include <span>
#include <vector>

#include "delenox/autoencoder.hpp"
#include "delenox/cppn.hpp"
#include "delenox/random.hpp"
#include "delenox/sprite.hpp"

namespace delenox {

using Features = Vector;

struct Individual {
  CppnGenome genome;
  Sprite sprite;
  FeasibilityReport report;
  /// Encoder output for the uncorrupted half-sprite; set for feasible
  /// individuals once they have been evaluated.
  std::optional<Features> features;
  /// rho for feasible individuals, f_inf for infeasible ones.
  double fitness = 0.0;

  bool feasible() const { return report.feasible; }
};

/// Renders the genome and scores its feasibility.
Individual make_individual(CppnGenome genome, SpriteShape shape);

struct ArchiveEntry {
  Features features;
  CppnGenome genome;
};

/// Per-run archive of novel individuals. Never shared across runs or
/// iterations.
struct NoveltyArchive {
  std::vector<ArchiveEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

struct SearchParams {
  int total_population = 200;
  int generations = 50;
  int k = 20;
  int l = 5;
  int elites_out = 10;
  MutationParams mutation;
  SpriteShape shape;

  void validate() const;
};

/// Mean Euclidean distance from `self` to its k nearest neighbours among
/// `neighbours`. Averages over all of them when fewer than k exist; returns
/// `lonely` when there are none.
double novelty_score(const Features& self, std::span<const Features* const> neighbours, int k,
                     double lonely);

/// rho for population[self]: neighbours are every other member of the
/// feasible population plus every archive entry. A lone individual scores
/// sqrt(N), the diameter of the feature hypercube.
double rho(std::size_t self, std::span<const Features> population, const NoveltyArchive& archive, int k);

/// Fitness-proportionate roulette wheel. Falls back to a uniform draw when
/// every fitness is zero.
std::size_t roulette_select(std::span<const double> fitness, Rng& rng);

struct SearchState {
  std::vector<Individual> feasible;
  std::vector<Individual> infeasible;
  NoveltyArchive archive;
  int generation = 0;

  std::size_t population() const { return feasible.size() + infeasible.size(); }
};

struct GenerationLog {
  int generation = 0;
  int n_feasible = 0;
  double mean_rho = 0.0;
  double max_rho = 0.0;
  int archive_size = 0;
};

/// Computes features and rho for the feasible population and f_inf fitness
/// for the infeasible one. Does not touch the archive.
GenerationLog evaluate_population(SearchState& state, const SearchParams& params,
                                  const DenoisingAutoencoder& encoder);

/// One FINS generation: evaluate, archive the l best feasible individuals,
/// breed total_population offspring (each population gets a share of the
/// offspring proportional to its size, parents drawn by roulette within the
/// population and mutated once per draw), route every offspring by its own
/// feasibility, and replace both populations. Returns the log of the
/// evaluation that drove selection.
GenerationLog step_generation(SearchState& state, const SearchParams& params,
                              const DenoisingAutoencoder& encoder, Rng& rng);

/// Builds the initial state. Slot i holds initial_genomes[i] for the first
/// cycle through the list; later slots hold mutated copies.
SearchState initial_state(std::span<const CppnGenome> initial_genomes, const SearchParams& params,
                          Rng& rng);

struct ExplorationResult {
  /// Up to elites_out feasible individuals ranked by final rho, best first.
  std::vector<Individual> elites;
  NoveltyArchive archive;
  /// One entry per generation plus the final evaluation.
  std::vector<GenerationLog> log;
  /// True when the final population held no feasible individual.
  bool starved = false;
};

ExplorationResult run_exploration(const DenoisingAutoencoder& encoder, const SearchParams& params,
                                  std::span<const CppnGenome> initial_genomes, Rng& rng);

}  // namespace delenox
