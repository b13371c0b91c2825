#include "delenox/presets.hpp"

#include <fmt/format.h>

namespace delenox {

std::string_view to_string(Preset preset) { return preset == Preset::Paper ? "paper" : "desk"; }

std::optional<Preset> parse_preset(std::string_view name) {
  if (name == "paper") return Preset::Paper;
  if (name == "desk") return Preset::Desk;
  return std::nullopt;
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig config;
  if (preset == Preset::Desk) {
    config.runs_per_iteration = 10;
    config.search.generations = 20;
    config.search.total_population = 100;
    config.train.epochs = 200;
    config.iterations = 3;
  }
  return config;
}

std::string config_echo(const ExperimentConfig& c, std::string_view mode, std::string_view preset) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
  line("mode", fmt::format("\"{}\"", mode));
  line("preset", fmt::format("\"{}\"", preset));
  line("seed", c.master_seed);
  line("iterations", c.iterations);
  line("runs", c.runs_per_iteration);
  line("generations", c.search.generations);
  line("population", c.search.total_population);
  line("epochs", c.train.epochs);
  line("bootstrap-size", c.bootstrap_size);
  line("k", c.search.k);
  line("l", c.search.l);
  line("elites", c.search.elites_out);
  line("features", c.train.features);
  line("learning-rate", c.train.learning_rate);
  line("corruption", c.train.corruption_rate);
  line("batch-size", c.train.batch_size);
  line("p-add-node", c.search.mutation.p_add_node);
  line("p-add-link", c.search.mutation.p_add_link);
  line("p-change-activation", c.search.mutation.p_change_activation);
  line("weight-perturb", c.search.mutation.weight_perturb_magnitude);
  line("width", c.search.shape.width);
  line("height", c.search.shape.height);
  line("max-shortfall", c.max_shortfall);
  return out;
}

}  // namespace delenox
