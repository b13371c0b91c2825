#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "delenox/pipeline.hpp"

namespace delenox {

/// paper: 100 runs, 50 generations, population 200, 1000 epochs, 6 iterations.
/// desk:  10 runs, 20 generations, population 100, 200 epochs, 3 iterations.
enum class Preset { Paper, Desk };

std::string_view to_string(Preset preset);
std::optional<Preset> parse_preset(std::string_view name);

ExperimentConfig preset_config(Preset preset);

/// Resolved configuration as `key = value` lines, readable back through the
/// CLI's --config option.
std::string config_echo(const ExperimentConfig& config, std::string_view mode, std::string_view preset);

}  // namespace delenox
