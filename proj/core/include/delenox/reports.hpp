#pragma once

#include <filesystem>
#include <vector>

#include "delenox/image_io.hpp"
#include "delenox/pipeline.hpp"

namespace delenox {

/// Grouped bar chart: one panel per run (transforming, static), one group per
/// training set, one bar per encoder with darker bars for earlier encoders.
GrayImage diversity_chart(const DiversityMatrix& matrix);

/// One polyline per loss curve, darker for earlier iterations.
GrayImage loss_chart(const std::vector<std::vector<double>>& curves);

/// Re-derives charts from the CSVs of a finished experiment directory and
/// writes them to <dir>/plots/. Returns the written files. Throws
/// MissingReportData when diversity_matrix.csv or a loss.csv is missing or
/// empty.
std::vector<std::filesystem::path> plot_reports(const std::filesystem::path& experiment_dir);

}  // namespace delenox
