#include "delenox/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

#include <fmt/format.h>

#include "delenox/error.hpp"
#include "delenox/experiment_io.hpp"

namespace fs = std::filesystem;

namespace delenox {

namespace {

constexpr int kMargin = 16;
constexpr int kPlotHeight = 240;

void fill_rect(GrayImage& image, int x0, int y0, int x1, int y1, std::uint8_t value) {
  x0 = std::clamp(x0, 0, image.width);
  x1 = std::clamp(x1, 0, image.width);
  y0 = std::clamp(y0, 0, image.height);
  y1 = std::clamp(y1, 0, image.height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) image.at(x, y) = value;
  }
}

void draw_line(GrayImage& image, int x0, int y0, int x1, int y1, std::uint8_t value) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0 && x0 < image.width && y0 < image.height) image.at(x0, y0) = value;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::uint8_t series_gray(std::size_t i, std::size_t n) {
  return static_cast<std::uint8_t>(n <= 1 ? 0 : std::lround(200.0 * static_cast<double>(i) / static_cast<double>(n - 1)));
}

}  // namespace

GrayImage diversity_chart(const DiversityMatrix& matrix) {
  constexpr int kBar = 4;
  constexpr int kGroupGap = 8;
  std::vector<std::vector<std::size_t>> panels(2);
  for (std::size_t c = 0; c < matrix.column_labels.size(); ++c) {
    panels[matrix.column_labels[c].starts_with("static") ? 1 : 0].push_back(c);
  }
  std::erase_if(panels, [](const auto& p) { return p.empty(); });

  const std::size_t rows = matrix.values.size();
  double top = 0.0;
  for (const auto& row : matrix.values) {
    for (double v : row) top = std::max(top, v);
  }
  if (!(top > 0.0)) top = 1.0;

  const int group_width = static_cast<int>(rows) * kBar + kGroupGap;
  int width = kMargin;
  for (const auto& panel : panels) width += static_cast<int>(panel.size()) * group_width + 2 * kMargin;
  GrayImage image(std::max(width, 2 * kMargin), kPlotHeight + 2 * kMargin, 255);

  int origin = kMargin;
  const int baseline = kMargin + kPlotHeight;
  for (const auto& panel : panels) {
    const int panel_width = static_cast<int>(panel.size()) * group_width + kMargin;
    draw_line(image, origin, kMargin, origin, baseline, 0);
    draw_line(image, origin, baseline, origin + panel_width, baseline, 0);
    for (std::size_t g = 0; g < panel.size(); ++g) {
      const int group_x = origin + kGroupGap / 2 + 1 + static_cast<int>(g) * group_width;
      for (std::size_t f = 0; f < rows; ++f) {
        const double v = std::max(0.0, matrix.values[f][panel[g]]);
        const int bar = static_cast<int>(std::lround(kPlotHeight * v / top));
        const int x = group_x + static_cast<int>(f) * kBar;
        fill_rect(image, x, baseline - bar, x + kBar - 1, baseline, series_gray(f, rows));
      }
    }
    origin += panel_width + kMargin;
  }
  return image;
}

GrayImage loss_chart(const std::vector<std::vector<double>>& curves) {
  constexpr int kPlotWidth = 400;
  double top = 0.0;
  std::size_t longest = 0;
  for (const auto& curve : curves) {
    longest = std::max(longest, curve.size());
    for (double v : curve) top = std::max(top, v);
  }
  if (!(top > 0.0)) top = 1.0;
  GrayImage image(kPlotWidth + 2 * kMargin, kPlotHeight + 2 * kMargin, 255);
  const int baseline = kMargin + kPlotHeight;
  draw_line(image, kMargin, kMargin, kMargin, baseline, 0);
  draw_line(image, kMargin, baseline, kMargin + kPlotWidth, baseline, 0);

  auto px = [&](std::size_t e) {
    return kMargin + (longest <= 1 ? 0 : static_cast<int>(std::lround(kPlotWidth * static_cast<double>(e) / static_cast<double>(longest - 1))));
  };
  auto py = [&](double v) { return baseline - static_cast<int>(std::lround(kPlotHeight * std::max(0.0, v) / top)); };
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& curve = curves[i];
    const std::uint8_t gray = series_gray(i, curves.size());
    for (std::size_t e = 1; e < curve.size(); ++e) {
      draw_line(image, px(e - 1), py(curve[e - 1]), px(e), py(curve[e]), gray);
    }
  }
  return image;
}

namespace {

void require_nonempty(const fs::path& path) {
  if (!fs::exists(path)) throw MissingReportData("missing " + path.string());
  if (fs::file_size(path) == 0) throw MissingReportData(path.string() + " is empty");
}

}  // namespace

std::vector<fs::path> plot_reports(const fs::path& experiment_dir) {
  const fs::path matrix_path = experiment_dir / "diversity_matrix.csv";
  require_nonempty(matrix_path);
  const DiversityMatrix matrix = read_diversity_matrix(matrix_path);
  if (matrix.values.empty() || matrix.column_labels.empty()) {
    throw MissingReportData(matrix_path.string() + " holds no scores");
  }

  // Read every input before writing anything so a bad directory leaves no
  // partial plots behind.
  std::vector<std::pair<Mode, std::vector<std::vector<double>>>> losses;
  for (Mode mode : {Mode::Transforming, Mode::Static}) {
    const fs::path mode_dir = experiment_dir / std::string(to_string(mode));
    if (!fs::exists(mode_dir)) continue;
    std::vector<std::vector<double>> curves;
    for (int i = 0; fs::exists(iteration_dir(experiment_dir, mode, i)); ++i) {
      const fs::path loss = iteration_dir(experiment_dir, mode, i) / "loss.csv";
      require_nonempty(loss);
      curves.push_back(read_loss_csv(loss));
      if (curves.back().empty()) throw MissingReportData(loss.string() + " holds no epochs");
    }
    if (curves.empty()) throw MissingReportData("no iterations under " + mode_dir.string());
    losses.emplace_back(mode, std::move(curves));
  }

  const fs::path plots = experiment_dir / "plots";
  fs::create_directories(plots);
  std::vector<fs::path> written;
  written.push_back(plots / "diversity.png");
  write_png(diversity_chart(matrix), written.back());
  for (const auto& [mode, curves] : losses) {
    written.push_back(plots / fmt::format("loss_{}.png", to_string(mode)));
    write_png(loss_chart(curves), written.back());
  }
  return written;
}

}  // namespace delenox
