#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "delenox/pipeline.hpp"

namespace delenox {

// Experiment directory layout:
//
//   <out>/config.toml
//   <out>/diversity_matrix.csv
//   <out>/<mode>/iter<i>/encoder.bin
//   <out>/<mode>/iter<i>/loss.csv              epoch,mse
//   <out>/<mode>/iter<i>/runlog_<r>.csv        generation,n_feasible,mean_rho,max_rho,archive_size
//   <out>/<mode>/iter<i>/training_set.csv      file,run,rank,rho,hidden_nodes
//   <out>/<mode>/iter<i>/elites/iter<i>_run<r>_rank<k>.pgm
//   <out>/<mode>/iter<i>/genomes/iter<i>_run<r>_rank<k>.txt
//   <out>/<mode>/iter<i>/features/feature<f>.pgm

std::string artifact_stem(int iteration, int run, int rank);
std::filesystem::path iteration_dir(const std::filesystem::path& root, Mode mode, int iteration);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void write_loss_csv(std::span<const double> loss, const std::filesystem::path& path);
std::vector<double> read_loss_csv(const std::filesystem::path& path);
void write_runlog(std::span<const GenerationLog> log, const std::filesystem::path& path);

void write_diversity_matrix(const DiversityMatrix& matrix, const std::filesystem::path& path);
DiversityMatrix read_diversity_matrix(const std::filesystem::path& path);

void write_iteration(const IterationRecord& record, const std::filesystem::path& root);
/// Same files as write_iteration(), written directly into `dir`.
void write_record_files(const IterationRecord& record, const std::filesystem::path& dir);

/// Loads every *.txt genome in a directory, sorted by file name.
std::vector<CppnGenome> load_genomes(const std::filesystem::path& dir);

}  // namespace delenox
