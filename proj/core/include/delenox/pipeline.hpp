#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delenox/autoencoder.hpp"
#include "delenox/novelty.hpp"

namespace delenox {

enum class Mode { Transforming, Static };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct ExperimentConfig {
  int iterations = 6;
  int runs_per_iteration = 100;
  /// Random minimal genomes rendered for the initial encoder's training set.
  int bootstrap_size = 1000;
  SearchParams search;
  TrainConfig train;
  std::uint64_t master_seed = 0;
  /// Worker threads for exploration runs and diversity scoring.
  int threads = 1;
  /// Fraction of missing elites (over runs * elites_out) that aborts an iteration.
  double max_shortfall = 0.5;

  void validate() const;
};

struct TrainingExample {
  CppnGenome genome;
  Sprite sprite;
  int run = 0;
  int rank = 0;
  /// Final-generation rho under the exploration encoder; 0 for bootstrap sprites.
  double rho = 0.0;
};

struct RunSummary {
  int run = 0;
  int elites = 0;
  bool starved = false;
  double seed_mean_hidden = 0.0;
  std::vector<GenerationLog> log;
};

struct IterationRecord {
  int index = 0;
  Mode mode = Mode::Transforming;
  std::vector<TrainingExample> training_set;
  DenoisingAutoencoder encoder;
  std::vector<double> loss_curve;
  std::vector<RunSummary> runs;
  /// Elites missing relative to runs * elites_out.
  int shortfall = 0;

  std::vector<Sprite> sprites() const;
  std::vector<std::vector<double>> half_inputs() const;
  double mean_hidden_nodes() const;
};

using ProgressFn = std::function<void(std::string_view)>;

/// Iteration 0: renders bootstrap_size random minimal genomes (no feasibility
/// filter) and trains the initial encoder on their half-sprites.
IterationRecord bootstrap_initial(const ExperimentConfig& config, const ProgressFn& progress = {});

/// One exploration phase (runs_per_iteration independent FINS runs driven by
/// prev.encoder) followed by a transformation phase. Transforming mode trains
/// a fresh encoder on the new training set; static mode carries prev.encoder
/// forward unchanged. Throws ExperimentAborted when the elite shortfall
/// exceeds max_shortfall.
IterationRecord run_iteration(const IterationRecord& prev, Mode mode, const ExperimentConfig& config,
                              int index, const ProgressFn& progress = {});

/// Mean pairwise Euclidean distance between encoded half-sprites.
double diversity(std::span<const Sprite> sprites, const DenoisingAutoencoder& encoder);
double diversity(std::span<const Features> features);

struct DiversityMatrix {
  /// Row f: encoder of iteration f.
  std::vector<std::string> row_labels;
  /// Columns: transforming_0..I then static_0..I (when present).
  std::vector<std::string> column_labels;
  std::vector<std::vector<double>> values;
};

/// Entry (f, s) is the diversity of training set s under encoder f. Rows
/// come from the transforming run (the static run's when it is the only
/// one given).
DiversityMatrix cross_diversity_matrix(std::span<const IterationRecord> transforming,
                                       std::span<const IterationRecord> static_run, int threads = 1);

struct GalleryEntry {
  std::size_t index = 0;
  double score = 0.0;
};

/// Scores each sprite by its mean feature distance to the rest of the set and
/// returns `count` entries by descending score: the most different, the least
/// different, and count - 2 evenly spaced ranks between them.
std::vector<GalleryEntry> sample_gallery(std::span<const Sprite> sprites,
                                         const DenoisingAutoencoder& encoder, std::size_t count);

struct ExperimentResult {
  std::vector<IterationRecord> transforming;
  std::vector<IterationRecord> static_run;
  DiversityMatrix diversity;
};

/// Runs the requested modes for config.iterations iterations. Both modes share
/// the bootstrap record. `on_iteration` sees each record as soon as it exists.
ExperimentResult run_experiment(const ExperimentConfig& config, bool run_transforming, bool run_static,
                                const ProgressFn& progress = {},
                                const std::function<void(const IterationRecord&)>& on_iteration = {});

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace delenox
