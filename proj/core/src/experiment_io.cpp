#include "delenox/experiment_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "delenox/error.hpp"
#include "delenox/image_io.hpp"

namespace fs = std::filesystem;

namespace delenox {

std::string artifact_stem(int iteration, int run, int rank) {
  return fmt::format("iter{}_run{}_rank{}", iteration, run, rank);
}

fs::path iteration_dir(const fs::path& root, Mode mode, int iteration) {
  return root / std::string(to_string(mode)) / fmt::format("iter{}", iteration);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& text, const fs::path& path) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(fmt::format("{}: bad number '{}'", path.string(), text));
  }
  return value;
}

std::vector<std::string> data_lines(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

void write_loss_csv(std::span<const double> loss, const fs::path& path) {
  std::string text = "epoch,mse\n";
  for (std::size_t e = 0; e < loss.size(); ++e) text += fmt::format("{},{}\n", e + 1, loss[e]);
  write_text(path, text);
}

std::vector<double> read_loss_csv(const fs::path& path) {
  const auto lines = data_lines(path);
  if (lines.empty() || lines.front() != "epoch,mse") throw FormatError(path.string() + ": missing epoch,mse header");
  std::vector<double> loss;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 2) throw FormatError(path.string() + ": expected two columns");
    loss.push_back(to_double(fields[1], path));
  }
  return loss;
}

void write_runlog(std::span<const GenerationLog> log, const fs::path& path) {
  std::string text = "generation,n_feasible,mean_rho,max_rho,archive_size\n";
  for (const GenerationLog& g : log) {
    text += fmt::format("{},{},{},{},{}\n", g.generation, g.n_feasible, g.mean_rho, g.max_rho, g.archive_size);
  }
  write_text(path, text);
}

void write_diversity_matrix(const DiversityMatrix& matrix, const fs::path& path) {
  std::string text = "encoder";
  for (const auto& label : matrix.column_labels) text += "," + label;
  text += "\n";
  for (std::size_t r = 0; r < matrix.values.size(); ++r) {
    text += matrix.row_labels[r];
    for (double v : matrix.values[r]) text += fmt::format(",{}", v);
    text += "\n";
  }
  write_text(path, text);
}

DiversityMatrix read_diversity_matrix(const fs::path& path) {
  const auto lines = data_lines(path);
  if (lines.empty()) throw FormatError(path.string() + ": empty diversity matrix");
  DiversityMatrix matrix;
  auto header = split_csv(lines.front());
  if (header.empty() || header.front() != "encoder") throw FormatError(path.string() + ": bad header");
  matrix.column_labels.assign(header.begin() + 1, header.end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_csv(lines[i]);
    if (fields.size() != header.size()) throw FormatError(path.string() + ": ragged row");
    matrix.row_labels.push_back(fields.front());
    std::vector<double> row;
    for (std::size_t c = 1; c < fields.size(); ++c) row.push_back(to_double(fields[c], path));
    matrix.values.push_back(std::move(row));
  }
  return matrix;
}

void write_iteration(const IterationRecord& record, const fs::path& root) {
  write_record_files(record, iteration_dir(root, record.mode, record.index));
}

void write_record_files(const IterationRecord& record, const fs::path& dir) {
  fs::create_directories(dir / "elites");
  fs::create_directories(dir / "genomes");
  fs::create_directories(dir / "features");

  save_model(record.encoder, dir / "encoder.bin");
  write_loss_csv(record.loss_curve, dir / "loss.csv");
  for (const RunSummary& run : record.runs) {
    write_runlog(run.log, dir / fmt::format("runlog_{}.csv", run.run));
  }

  std::string index = "file,run,rank,rho,hidden_nodes\n";
  for (const TrainingExample& example : record.training_set) {
    const std::string stem = artifact_stem(record.index, example.run, example.rank);
    write_pgm(to_image(example.sprite), dir / "elites" / (stem + ".pgm"));
    write_text(dir / "genomes" / (stem + ".txt"), serialize(example.genome));
    index += fmt::format("{},{},{},{},{}\n", stem, example.run, example.rank, example.rho,
                         example.genome.hidden_count());
  }
  write_text(dir / "training_set.csv", index);

  if (!record.training_set.empty()) {
    const SpriteShape shape = record.training_set.front().sprite.shape();
    if (record.encoder.inputs() == shape.half_size()) {
      const auto images = feature_images(record.encoder, shape);
      for (std::size_t f = 0; f < images.size(); ++f) {
        write_pgm(images[f], dir / "features" / fmt::format("feature{}.pgm", f));
      }
    }
  }
}

std::vector<CppnGenome> load_genomes(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CppnGenome> genomes;
  genomes.reserve(files.size());
  for (const auto& file : files) genomes.push_back(parse_genome(read_text(file)));
  return genomes;
}

}  // namespace delenox
