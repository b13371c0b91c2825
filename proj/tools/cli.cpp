#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "delenox/error.hpp"
#include "delenox/experiment_io.hpp"
#include "delenox/image_io.hpp"
#include "delenox/presets.hpp"
#include "delenox/reports.hpp"

namespace fs = std::filesystem;

namespace delenox::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment parameters shared by every subcommand that searches or trains.
/// Unset overrides fall back to the chosen preset.
struct ParamFlags {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string preset = "paper";
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<int> iterations, runs, generations, population, epochs, bootstrap_size;
  std::optional<int> k, l, elites, features, batch_size, width, height;
  std::optional<double> learning_rate, corruption, p_add_node, p_add_link, p_change_activation;
  std::optional<double> weight_perturb, max_shortfall;
};

void add_param_options(CLI::App* app, ParamFlags& f) {
  f.app = app;
  // CLI11 only reads config files for the top-level app, so subcommands load
  // theirs in apply_config_file().
  app->add_option("--config", f.config_path, "file of `option = value` lines (e.g. an echoed config.toml)");
  app->add_option("--preset", f.preset, "scale preset")->check(CLI::IsMember({"paper", "desk"}))->capture_default_str();
  app->add_option("--seed", f.seed, "master seed")->capture_default_str();
  app->add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
  app->add_option("--iterations", f.iterations, "exploration/transformation iterations");
  app->add_option("--runs", f.runs, "independent FINS runs per iteration");
  app->add_option("--generations", f.generations, "generations per run");
  app->add_option("--population", f.population, "total population per run");
  app->add_option("--epochs", f.epochs, "autoencoder training epochs");
  app->add_option("--bootstrap-size", f.bootstrap_size, "random genomes behind the initial encoder");
  app->add_option("--k", f.k, "nearest neighbours in the novelty score");
  app->add_option("--l", f.l, "archive insertions per generation");
  app->add_option("--elites", f.elites, "elites harvested per run");
  app->add_option("--features", f.features, "autoencoder hidden units");
  app->add_option("--batch-size", f.batch_size, "examples per SGD update");
  app->add_option("--width", f.width, "sprite width (odd)");
  app->add_option("--height", f.height, "sprite height");
  app->add_option("--learning-rate", f.learning_rate, "SGD step size");
  app->add_option("--corruption", f.corruption, "masking-noise rate");
  app->add_option("--p-add-node", f.p_add_node, "add-node mutation probability");
  app->add_option("--p-add-link", f.p_add_link, "add-link mutation probability");
  app->add_option("--p-change-activation", f.p_change_activation, "activation mutation probability");
  app->add_option("--weight-perturb", f.weight_perturb, "weight perturbation magnitude");
  app->add_option("--max-shortfall", f.max_shortfall, "tolerated fraction of missing elites");
}

/// Feeds each `key = value` line of the config file to the matching option
/// unless that option was given on the command line.
void apply_config_file(const ParamFlags& f) {
  if (f.config_path.empty()) return;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(f.config_path);
  } catch (const CLI::Error& e) {
    throw UsageError(fmt::format("cannot read config {}: {}", f.config_path, e.what()));
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    CLI::Option* opt = f.app->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      // Echoed configs carry the experiment mode, which other commands ignore.
      if (item.name == "mode") continue;
      throw UsageError(fmt::format("config {}: unknown key '{}'", f.config_path, item.fullname()));
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(fmt::format("config {}: {}", f.config_path, e.what()));
    }
  }
}

ExperimentConfig resolve(const ParamFlags& f) {
  apply_config_file(f);
  ExperimentConfig c = preset_config(*parse_preset(f.preset));
  c.master_seed = f.seed;
  c.threads = f.threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : f.threads;
  auto set = [](auto& target, const auto& value) {
    if (value) target = *value;
  };
  set(c.iterations, f.iterations);
  set(c.runs_per_iteration, f.runs);
  set(c.search.generations, f.generations);
  set(c.search.total_population, f.population);
  set(c.train.epochs, f.epochs);
  set(c.bootstrap_size, f.bootstrap_size);
  set(c.search.k, f.k);
  set(c.search.l, f.l);
  set(c.search.elites_out, f.elites);
  set(c.train.features, f.features);
  set(c.train.batch_size, f.batch_size);
  set(c.search.shape.width, f.width);
  set(c.search.shape.height, f.height);
  set(c.train.learning_rate, f.learning_rate);
  set(c.train.corruption_rate, f.corruption);
  set(c.search.mutation.p_add_node, f.p_add_node);
  set(c.search.mutation.p_add_link, f.p_add_link);
  set(c.search.mutation.p_change_activation, f.p_change_activation);
  set(c.search.mutation.weight_perturb_magnitude, f.weight_perturb);
  set(c.max_shortfall, f.max_shortfall);
  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  return c;
}

std::vector<Sprite> load_sprites(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Sprite> sprites;
  for (const auto& file : files) sprites.push_back(to_sprite(read_pgm(file)));
  return sprites;
}

/// Sprites from --genomes (rendered) or --sprites (PGM files).
std::vector<Sprite> load_sprite_set(const std::string& genomes, const std::string& sprites, SpriteShape shape) {
  if (genomes.empty() == sprites.empty()) throw UsageError("give exactly one of --genomes or --sprites");
  if (!sprites.empty()) return load_sprites(sprites);
  std::vector<Sprite> out;
  for (const auto& g : load_genomes(genomes)) out.push_back(render(g, shape));
  return out;
}

void save_image(const GrayImage& image, const fs::path& path) {
  if (path.extension() == ".png") {
    write_png(image, path);
  } else {
    write_pgm(image, path);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"DeLeNoX: novelty search over CPPN spaceship sprites with autoencoder-derived distances"};
  app.require_subcommand(1);

  // render
  std::string render_genome, render_out;
  int render_width = 49, render_height = 49;
  auto* render_cmd = app.add_subcommand("render", "render a genome file to a sprite image");
  render_cmd->add_option("--genome", render_genome, "genome file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--out", render_out, "output .pgm or .png")->required();
  render_cmd->add_option("--width", render_width, "sprite width (odd)")->capture_default_str();
  render_cmd->add_option("--height", render_height, "sprite height")->capture_default_str();

  // bootstrap
  ParamFlags bootstrap_flags;
  std::string bootstrap_out;
  auto* bootstrap_cmd = app.add_subcommand("bootstrap", "train the initial encoder on random minimal CPPNs");
  add_param_options(bootstrap_cmd, bootstrap_flags);
  bootstrap_cmd->add_option("--out", bootstrap_out, "output directory")->required();

  // explore
  ParamFlags explore_flags;
  std::string explore_encoder, explore_genomes, explore_out;
  int explore_run = 0;
  auto* explore_cmd = app.add_subcommand("explore", "run one feasible-infeasible novelty search");
  add_param_options(explore_cmd, explore_flags);
  explore_cmd->add_option("--encoder", explore_encoder, "encoder.bin driving the novelty score")
      ->required()
      ->check(CLI::ExistingFile);
  explore_cmd->add_option("--genomes", explore_genomes, "directory of seed genomes (default: minimal CPPNs)")
      ->check(CLI::ExistingDirectory);
  explore_cmd->add_option("--run", explore_run, "run index used to derive the random stream")->capture_default_str();
  explore_cmd->add_option("--out", explore_out, "output directory")->required();

  // train
  ParamFlags train_flags;
  std::string train_genomes, train_sprites, train_out;
  auto* train_cmd = app.add_subcommand("train", "train a denoising autoencoder on a sprite set");
  add_param_options(train_cmd, train_flags);
  train_cmd->add_option("--genomes", train_genomes, "directory of genome files")->check(CLI::ExistingDirectory);
  train_cmd->add_option("--sprites", train_sprites, "directory of PGM sprites")->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", train_out, "output directory")->required();

  // experiment
  ParamFlags experiment_flags;
  std::string experiment_mode = "both", experiment_out = "out";
  bool dry_run = false;
  auto* experiment_cmd = app.add_subcommand("experiment", "run the transforming and/or static experiment");
  add_param_options(experiment_cmd, experiment_flags);
  experiment_cmd->add_option("--mode", experiment_mode, "which run(s) to execute")
      ->check(CLI::IsMember({"transforming", "static", "both"}))
      ->capture_default_str();
  experiment_cmd->add_option("--out", experiment_out, "experiment directory")->capture_default_str();
  experiment_cmd->add_flag("--dry-run", dry_run, "print the resolved configuration and exit");

  // diversity
  std::string diversity_encoder, diversity_genomes, diversity_sprites;
  int diversity_width = 49, diversity_height = 49;
  auto* diversity_cmd = app.add_subcommand("diversity", "mean pairwise feature distance of a sprite set");
  diversity_cmd->add_option("--encoder", diversity_encoder, "encoder.bin")->required()->check(CLI::ExistingFile);
  diversity_cmd->add_option("--genomes", diversity_genomes, "directory of genome files")->check(CLI::ExistingDirectory);
  diversity_cmd->add_option("--sprites", diversity_sprites, "directory of PGM sprites")->check(CLI::ExistingDirectory);
  diversity_cmd->add_option("--width", diversity_width, "sprite width for --genomes")->capture_default_str();
  diversity_cmd->add_option("--height", diversity_height, "sprite height for --genomes")->capture_default_str();

  // gallery
  std::string gallery_encoder, gallery_genomes, gallery_sprites, gallery_out;
  std::size_t gallery_count = 6;
  int gallery_width = 49, gallery_height = 49;
  auto* gallery_cmd = app.add_subcommand("gallery", "pick most/least different sprites and evenly spaced ranks");
  gallery_cmd->add_option("--encoder", gallery_encoder, "encoder.bin")->required()->check(CLI::ExistingFile);
  gallery_cmd->add_option("--genomes", gallery_genomes, "directory of genome files")->check(CLI::ExistingDirectory);
  gallery_cmd->add_option("--sprites", gallery_sprites, "directory of PGM sprites")->check(CLI::ExistingDirectory);
  gallery_cmd->add_option("--count", gallery_count, "sprites to pick")->capture_default_str();
  gallery_cmd->add_option("--width", gallery_width, "sprite width for --genomes")->capture_default_str();
  gallery_cmd->add_option("--height", gallery_height, "sprite height for --genomes")->capture_default_str();
  gallery_cmd->add_option("--out", gallery_out, "output directory")->required();

  // plot
  std::string plot_dir;
  auto* plot_cmd = app.add_subcommand("plot", "draw diversity and loss charts from an experiment directory");
  plot_cmd->add_option("--dir", plot_dir, "experiment directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto progress = [&err](std::string_view message) { err << message << std::endl; };

  try {
    if (render_cmd->parsed()) {
      const CppnGenome genome = parse_genome(read_text(render_genome));
      save_image(to_image(render(genome, SpriteShape{render_width, render_height})), render_out);
      return kOk;
    }

    if (bootstrap_cmd->parsed()) {
      const ExperimentConfig config = resolve(bootstrap_flags);
      IterationRecord record = bootstrap_initial(config, progress);
      write_record_files(record, bootstrap_out);
      out << fmt::format("initial encoder: {} features x {} inputs, final loss {}\n", record.encoder.features(),
                         record.encoder.inputs(), record.loss_curve.empty() ? 0.0 : record.loss_curve.back());
      return kOk;
    }

    if (explore_cmd->parsed()) {
      const ExperimentConfig config = resolve(explore_flags);
      const DenoisingAutoencoder encoder = load_model(explore_encoder);
      Rng rng = make_rng(config.master_seed, "explore-cli", {static_cast<std::uint64_t>(explore_run)});
      std::vector<CppnGenome> seeds;
      if (explore_genomes.empty()) {
        for (int i = 0; i < config.search.total_population; ++i) seeds.push_back(random_minimal(rng));
      } else {
        seeds = load_genomes(explore_genomes);
        if (seeds.empty()) throw UsageError("no genome files in " + explore_genomes);
      }
      ExplorationResult result = run_exploration(encoder, config.search, seeds, rng);
      const fs::path dir = explore_out;
      fs::create_directories(dir / "elites");
      fs::create_directories(dir / "genomes");
      write_runlog(result.log, dir / "runlog.csv");
      for (std::size_t k = 0; k < result.elites.size(); ++k) {
        const std::string stem = artifact_stem(0, explore_run, static_cast<int>(k));
        write_pgm(to_image(result.elites[k].sprite), dir / "elites" / (stem + ".pgm"));
        write_text(dir / "genomes" / (stem + ".txt"), serialize(result.elites[k].genome));
        out << fmt::format("{} rho={}\n", stem, result.elites[k].fitness);
      }
      if (result.starved) {
        err << "exploration ended without feasible individuals\n";
        return kAborted;
      }
      return kOk;
    }

    if (train_cmd->parsed()) {
      const ExperimentConfig config = resolve(train_flags);
      const auto sprites = load_sprite_set(train_genomes, train_sprites, config.search.shape);
      if (sprites.empty()) throw UsageError("training set is empty");
      std::vector<std::vector<double>> inputs;
      for (const auto& s : sprites) inputs.push_back(half_input(s));
      TrainConfig train_config = config.train;
      train_config.seed = derive_seed(config.master_seed, "train", {0});
      const TrainResult result = train(inputs, train_config);
      const fs::path dir = train_out;
      fs::create_directories(dir / "features");
      save_model(result.model, dir / "encoder.bin");
      write_loss_csv(result.loss_curve, dir / "loss.csv");
      const auto images = feature_images(result.model, sprites.front().shape());
      for (std::size_t f = 0; f < images.size(); ++f) {
        write_pgm(images[f], dir / "features" / fmt::format("feature{}.pgm", f));
      }
      out << fmt::format("trained on {} sprites, final loss {}\n", sprites.size(),
                         result.loss_curve.empty() ? 0.0 : result.loss_curve.back());
      return kOk;
    }

    if (experiment_cmd->parsed()) {
      const ExperimentConfig config = resolve(experiment_flags);
      const std::string echo = config_echo(config, experiment_mode, experiment_flags.preset);
      out << echo;
      if (dry_run) return kOk;
      const fs::path root = experiment_out;
      fs::create_directories(root);
      write_text(root / "config.toml", echo);
      const ExperimentResult result =
          run_experiment(config, experiment_mode != "static", experiment_mode != "transforming", progress,
                         [&root](const IterationRecord& record) { write_iteration(record, root); });
      write_diversity_matrix(result.diversity, root / "diversity_matrix.csv");
      return kOk;
    }

    if (diversity_cmd->parsed()) {
      const auto encoder = load_model(diversity_encoder);
      const auto sprites =
          load_sprite_set(diversity_genomes, diversity_sprites, SpriteShape{diversity_width, diversity_height});
      out << fmt::format("{}\n", diversity(sprites, encoder));
      return kOk;
    }

    if (gallery_cmd->parsed()) {
      const auto encoder = load_model(gallery_encoder);
      const auto sprites =
          load_sprite_set(gallery_genomes, gallery_sprites, SpriteShape{gallery_width, gallery_height});
      const auto picks = sample_gallery(sprites, encoder, gallery_count);
      fs::create_directories(gallery_out);
      for (std::size_t j = 0; j < picks.size(); ++j) {
        write_pgm(to_image(sprites[picks[j].index]), fs::path(gallery_out) / fmt::format("gallery_{}.pgm", j));
        out << fmt::format("{},{},{}\n", j, picks[j].index, picks[j].score);
      }
      return kOk;
    }

    if (plot_cmd->parsed()) {
      for (const auto& path : plot_reports(plot_dir)) out << path.string() << '\n';
      return kOk;
    }
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const ExperimentAborted& e) {
    err << "aborted: " << e.what() << '\n';
    return kAborted;
  } catch (const MissingReportData& e) {
    err << "missing report data: " << e.what() << '\n';
    return kMissingReportData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace delenox::cli
