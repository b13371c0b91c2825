#include "delenox/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "delenox/error.hpp"

namespace delenox {

std::string_view to_string(Mode mode) {
  return mode == Mode::Transforming ? "transforming" : "static";
}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "transforming") return Mode::Transforming;
  if (name == "static") return Mode::Static;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (iterations < 1) throw ContractViolation("iterations must be at least 1");
  if (runs_per_iteration < 1) throw ContractViolation("runs per iteration must be at least 1");
  if (bootstrap_size < 1) throw ContractViolation("bootstrap size must be at least 1");
  if (threads < 1) throw ContractViolation("thread count must be at least 1");
  if (!(max_shortfall >= 0.0 && max_shortfall <= 1.0)) throw ContractViolation("max shortfall outside [0,1]");
  search.validate();
  if (search.elites_out < 1) throw ContractViolation("elites_out must be at least 1");
  if (search.shape.width % 2 == 0) throw ContractViolation("sprite width must be odd");
  train.validate();
}

std::vector<Sprite> IterationRecord::sprites() const {
  std::vector<Sprite> out;
  out.reserve(training_set.size());
  for (const auto& example : training_set) out.push_back(example.sprite);
  return out;
}

std::vector<std::vector<double>> IterationRecord::half_inputs() const {
  std::vector<std::vector<double>> out;
  out.reserve(training_set.size());
  for (const auto& example : training_set) out.push_back(half_input(example.sprite));
  return out;
}

double IterationRecord::mean_hidden_nodes() const {
  if (training_set.empty()) return 0.0;
  double total = 0.0;
  for (const auto& example : training_set) total += static_cast<double>(example.genome.hidden_count());
  return total / static_cast<double>(training_set.size());
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

TrainConfig iteration_train_config(const ExperimentConfig& config, int index) {
  TrainConfig train = config.train;
  train.seed = derive_seed(config.master_seed, "train", {static_cast<std::uint64_t>(index)});
  return train;
}

void report(const ProgressFn& progress, const std::string& message) {
  if (progress) progress(message);
}

}  // namespace

IterationRecord bootstrap_initial(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  Rng rng = make_rng(config.master_seed, "bootstrap");
  std::vector<TrainingExample> set;
  set.reserve(static_cast<std::size_t>(config.bootstrap_size));
  for (int i = 0; i < config.bootstrap_size; ++i) {
    CppnGenome genome = random_minimal(rng);
    Sprite sprite = render(genome, config.search.shape);
    set.push_back({std::move(genome), std::move(sprite), 0, i, 0.0});
  }

  std::vector<std::vector<double>> inputs;
  inputs.reserve(set.size());
  for (const auto& example : set) inputs.push_back(half_input(example.sprite));
  report(progress, fmt::format("iteration 0: training initial encoder on {} sprites", inputs.size()));
  TrainResult trained = train(inputs, iteration_train_config(config, 0));

  return IterationRecord{0, Mode::Transforming, std::move(set), std::move(trained.model),
                         std::move(trained.loss_curve), {}, 0};
}

IterationRecord run_iteration(const IterationRecord& prev, Mode mode, const ExperimentConfig& config,
                              int index, const ProgressFn& progress) {
  config.validate();
  if (index < 1) throw ContractViolation("exploration iterations are numbered from 1");
  const auto runs = static_cast<std::size_t>(config.runs_per_iteration);
  const auto population = static_cast<std::size_t>(config.search.total_population);
  if (index > 1 && prev.training_set.empty()) {
    throw ContractViolation("previous iteration has no elites to seed from");
  }

  std::vector<ExplorationResult> results(runs);
  std::vector<double> seed_hidden(runs, 0.0);
  parallel_for(runs, config.threads, [&](std::size_t r) {
    Rng rng = make_rng(config.master_seed, "explore",
                       {static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(r)});
    std::vector<CppnGenome> seeds;
    seeds.reserve(population);
    for (std::size_t i = 0; i < population; ++i) {
      if (index == 1) {
        seeds.push_back(random_minimal(rng));
      } else {
        seeds.push_back(prev.training_set[uniform_index(rng, prev.training_set.size())].genome);
      }
    }
    double hidden = 0.0;
    for (const auto& g : seeds) hidden += static_cast<double>(g.hidden_count());
    seed_hidden[r] = hidden / static_cast<double>(seeds.size());
    results[r] = run_exploration(prev.encoder, config.search, seeds, rng);
  });

  std::vector<TrainingExample> set;
  std::vector<RunSummary> summaries;
  for (std::size_t r = 0; r < runs; ++r) {
    auto& result = results[r];
    for (std::size_t k = 0; k < result.elites.size(); ++k) {
      Individual& elite = result.elites[k];
      set.push_back({std::move(elite.genome), std::move(elite.sprite), static_cast<int>(r),
                     static_cast<int>(k), elite.fitness});
    }
    summaries.push_back({static_cast<int>(r), static_cast<int>(result.elites.size()), result.starved,
                         seed_hidden[r], std::move(result.log)});
  }

  const int expected = config.runs_per_iteration * config.search.elites_out;
  const int shortfall = expected - static_cast<int>(set.size());
  if (static_cast<double>(shortfall) > config.max_shortfall * expected || set.empty()) {
    throw ExperimentAborted(fmt::format(
        "iteration {} ({}): only {} of {} elites were feasible; exploration is feasibility-starved", index,
        to_string(mode), set.size(), expected));
  }
  report(progress, fmt::format("iteration {} ({}): {} elites, mean hidden nodes {:.2f}", index,
                               to_string(mode), set.size(),
                               [&] {
                                 double h = 0.0;
                                 for (const auto& e : set) h += static_cast<double>(e.genome.hidden_count());
                                 return h / static_cast<double>(set.size());
                               }()));

  IterationRecord record{index, mode, std::move(set), prev.encoder, {}, std::move(summaries), shortfall};
  if (mode == Mode::Transforming) {
    report(progress, fmt::format("iteration {} ({}): training encoder", index, to_string(mode)));
    TrainResult trained = train(record.half_inputs(), iteration_train_config(config, index));
    record.encoder = std::move(trained.model);
    record.loss_curve = std::move(trained.loss_curve);
  } else {
    record.loss_curve = prev.loss_curve;
  }
  return record;
}

double diversity(std::span<const Features> features) {
  if (features.size() < 2) throw ContractViolation("diversity needs at least two sprites");
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t j = i + 1; j < features.size(); ++j) total += (features[i] - features[j]).norm();
  }
  const double pairs = 0.5 * static_cast<double>(features.size()) * static_cast<double>(features.size() - 1);
  return total / pairs;
}

namespace {

std::vector<Features> encode_all(std::span<const Sprite> sprites, const DenoisingAutoencoder& encoder) {
  std::vector<Features> out;
  out.reserve(sprites.size());
  for (const Sprite& s : sprites) out.push_back(encode(encoder, half_input(s)));
  return out;
}

}  // namespace

double diversity(std::span<const Sprite> sprites, const DenoisingAutoencoder& encoder) {
  if (sprites.size() < 2) throw ContractViolation("diversity needs at least two sprites");
  return diversity(encode_all(sprites, encoder));
}

DiversityMatrix cross_diversity_matrix(std::span<const IterationRecord> transforming,
                                       std::span<const IterationRecord> static_run, int threads) {
  DiversityMatrix matrix;
  std::span<const IterationRecord> encoders = transforming.empty() ? static_run : transforming;
  std::vector<std::vector<Sprite>> sets;
  for (const auto& record : transforming) {
    matrix.column_labels.push_back(fmt::format("transforming_{}", record.index));
    sets.push_back(record.sprites());
  }
  for (const auto& record : static_run) {
    matrix.column_labels.push_back(fmt::format("static_{}", record.index));
    sets.push_back(record.sprites());
  }
  for (const auto& record : encoders) matrix.row_labels.push_back(fmt::format("encoder_{}", record.index));

  matrix.values.assign(encoders.size(), std::vector<double>(sets.size(), 0.0));
  parallel_for(encoders.size() * sets.size(), threads, [&](std::size_t cell) {
    const std::size_t f = cell / sets.size();
    const std::size_t s = cell % sets.size();
    matrix.values[f][s] = diversity(sets[s], encoders[f].encoder);
  });
  return matrix;
}

std::vector<GalleryEntry> sample_gallery(std::span<const Sprite> sprites, const DenoisingAutoencoder& encoder,
                                         std::size_t count) {
  if (count > sprites.size()) throw ContractViolation("gallery larger than the sprite set");
  if (count == 0) return {};
  const std::vector<Features> features = encode_all(sprites, encoder);
  const std::size_t n = features.size();

  std::vector<GalleryEntry> scored(n);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) total += (features[i] - features[j]).norm();
    }
    scored[i] = {i, n > 1 ? total / static_cast<double>(n - 1) : 0.0};
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const GalleryEntry& a, const GalleryEntry& b) { return a.score > b.score; });
  if (count == 1) return {scored.front()};

  std::vector<GalleryEntry> picked;
  picked.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double pos = static_cast<double>(j) * static_cast<double>(n - 1) / static_cast<double>(count - 1);
    picked.push_back(scored[static_cast<std::size_t>(std::lround(pos))]);
  }
  return picked;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool run_transforming, bool run_static,
                                const ProgressFn& progress,
                                const std::function<void(const IterationRecord&)>& on_iteration) {
  config.validate();
  if (!run_transforming && !run_static) throw ContractViolation("no experiment mode selected");
  ExperimentResult result;
  const IterationRecord initial = bootstrap_initial(config, progress);

  auto run_mode = [&](Mode mode, std::vector<IterationRecord>& records) {
    IterationRecord first = initial;
    first.mode = mode;
    records.push_back(std::move(first));
    if (on_iteration) on_iteration(records.back());
    for (int i = 1; i <= config.iterations; ++i) {
      records.push_back(run_iteration(records.back(), mode, config, i, progress));
      if (on_iteration) on_iteration(records.back());
    }
  };
  if (run_transforming) run_mode(Mode::Transforming, result.transforming);
  if (run_static) run_mode(Mode::Static, result.static_run);

  report(progress, "scoring cross-iteration diversity");
  result.diversity = cross_diversity_matrix(result.transforming, result.static_run, config.threads);
  return result;
}

}  // namespace delenox
