#include "delenox/sprite.hpp"

#include <algorithm>
#include <cmath>

#include "delenox/error.hpp"

namespace delenox {

Sprite::Sprite(SpriteShape shape) : shape_(shape) {
  if (shape.width <= 0 || shape.height <= 0) throw ContractViolation("sprite dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(shape.width) * static_cast<std::size_t>(shape.height), 0);
}

int Sprite::hull_pixels() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool Sprite::is_mirror_symmetric() const {
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) {
      if (at(x, y) != at(width() - 1 - x, y)) return false;
    }
  }
  return true;
}

bool Sprite::has_single_run_columns() const {
  for (int x = 0; x < width(); ++x) {
    int runs = 0;
    bool previous = false;
    for (int y = 0; y < height(); ++y) {
      bool current = at(x, y);
      if (current && !previous) ++runs;
      previous = current;
    }
    if (runs > 1) return false;
  }
  return true;
}

namespace {

int to_row(double y, int height) {
  const double clamped = std::isfinite(y) ? std::clamp(y, 0.0, 1.0) : 0.0;
  return static_cast<int>(std::lround(clamped * (height - 1)));
}

}  // namespace

Sprite render(const CppnGenome& genome, SpriteShape shape) {
  if (shape.width % 2 == 0) throw ContractViolation("render requires an odd sprite width");
  Sprite sprite(shape);
  const CppnNetwork network(genome);
  const int mirror = shape.mirror_column();
  for (int x = 0; x <= mirror; ++x) {
    const double x_norm = mirror == 0 ? 0.0 : static_cast<double>(x) / mirror;
    const int top = to_row(network(x_norm, -0.5), shape.height);
    const int bottom = to_row(network(x_norm, 0.5), shape.height);
    for (int y = top; y <= bottom; ++y) {
      sprite.set(x, y, true);
      sprite.set(2 * mirror - x, y, true);
    }
  }
  return sprite;
}

std::vector<int> connected_components(const Sprite& sprite) {
  const int w = sprite.width();
  const int h = sprite.height();
  std::vector<char> visited(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  auto flat = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  std::vector<int> sizes;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!sprite.at(x, y) || visited[flat(x, y)]) continue;
      int size = 0;
      stack.assign(1, {x, y});
      visited[flat(x, y)] = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++size;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int nx = cx + dx[d];
          int ny = cy + dy[d];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (!sprite.at(nx, ny) || visited[flat(nx, ny)]) continue;
          visited[flat(nx, ny)] = 1;
          stack.emplace_back(nx, ny);
        }
      }
      sizes.push_back(size);
    }
  }
  return sizes;
}

FeasibilityReport feasibility(const Sprite& sprite) {
  FeasibilityReport report;
  int min_x = sprite.width(), max_x = -1, min_y = sprite.height(), max_y = -1;
  for (int y = 0; y < sprite.height(); ++y) {
    for (int x = 0; x < sprite.width(); ++x) {
      if (!sprite.at(x, y)) continue;
      ++report.area;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (report.area > 0) {
    report.width = max_x - min_x + 1;
    report.height = max_y - min_y + 1;
    const auto sizes = connected_components(sprite);
    report.detached_area = report.area - *std::max_element(sizes.begin(), sizes.end());
  }

  const double W = sprite.width();
  const double H = sprite.height();
  const double width_penalty = std::max(0.0, 1.0 - 2.0 * report.width / W);
  const double height_penalty = std::max(0.0, 1.0 - 2.0 * report.height / H);
  const double detached_ratio =
      report.area == 0 ? 1.0 : static_cast<double>(report.detached_area) / report.area;
  report.f_inf = 1.0 - (width_penalty + height_penalty + detached_ratio) / 3.0;

  report.feasible = report.area > 0 && report.detached_area == 0 &&
                    2 * report.width >= sprite.width() && 2 * report.height >= sprite.height();
  return report;
}

std::vector<double> half_input(const Sprite& sprite) {
  const SpriteShape shape = sprite.shape();
  std::vector<double> out(static_cast<std::size_t>(shape.half_size()), 0.0);
  for (int x = 0; x < shape.half_width(); ++x) {
    for (int y = 0; y < shape.height; ++y) {
      out[static_cast<std::size_t>(x) * shape.height + y] = sprite.at(x, y) ? 1.0 : 0.0;
    }
  }
  return out;
}

Sprite sprite_from_half(std::span<const double> half, SpriteShape shape) {
  if (half.size() != static_cast<std::size_t>(shape.half_size())) {
    throw ContractViolation("half-sprite length does not match sprite shape");
  }
  Sprite sprite(shape);
  const int mirror = shape.mirror_column();
  for (int x = 0; x <= mirror; ++x) {
    for (int y = 0; y < shape.height; ++y) {
      if (half[static_cast<std::size_t>(x) * shape.height + y] > 0.5) {
        sprite.set(x, y, true);
        sprite.set(2 * mirror - x, y, true);
      }
    }
  }
  return sprite;
}

}  // namespace delenox
