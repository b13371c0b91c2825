#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "delenox/cppn.hpp"

namespace delenox {

/// Sprite dimensions in pixels. Width must be odd for rendering so that the
/// middle column is its own mirror image.
struct SpriteShape {
  int width = 49;
  int height = 49;

  /// 0-based index of the mirror column.
  int mirror_column() const { return (width + 1) / 2 - 1; }
  int half_width() const { return (width + 1) / 2; }
  /// Length of the half-sprite input vector, H * ceil(W/2).
  int half_size() const { return height * half_width(); }

  friend bool operator==(const SpriteShape&, const SpriteShape&) = default;
};

/// Binary bitmap, 1 = hull. Row 0 is the top row.
class Sprite {
 public:
  Sprite() = default;
  explicit Sprite(SpriteShape shape);

  SpriteShape shape() const { return shape_; }
  int width() const { return shape_.width; }
  int height() const { return shape_.height; }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool hull) { bits_[index(x, y)] = hull ? 1 : 0; }

  int hull_pixels() const;
  bool is_mirror_symmetric() const;
  /// True when every column's hull pixels form at most one contiguous run.
  bool has_single_run_columns() const;

  friend bool operator==(const Sprite&, const Sprite&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
           static_cast<std::size_t>(x);
  }

  SpriteShape shape_{0, 0};
  std::vector<std::uint8_t> bits_;
};

struct FeasibilityReport {
  bool feasible = false;
  double f_inf = 0.0;
  int width = 0;           // bounding-box width w
  int height = 0;          // bounding-box height h
  int area = 0;            // A
  int detached_area = 0;   // A_s: hull pixels outside the largest component

  friend bool operator==(const FeasibilityReport&, const FeasibilityReport&) = default;
};

/// Column construction: for each column x in [0, x_m], query the CPPN at
/// x / x_m with C = -0.5 (top) and C = +0.5 (bottom), map outputs to rows
/// round(y * (H - 1)); the column is empty if top lies below bottom, otherwise
/// filled from top to bottom inclusive. Columns past x_m mirror the left half.
Sprite render(const CppnGenome& genome, SpriteShape shape);

/// Sizes of the 4-connected hull components, in raster discovery order.
std::vector<int> connected_components(const Sprite& sprite);

FeasibilityReport feasibility(const Sprite& sprite);

/// Columns 0..x_m flattened column-major: element [x * H + y] is pixel (x, y).
std::vector<double> half_input(const Sprite& sprite);

/// Inverse of half_input(): rebuilds the full mirrored sprite. Values > 0.5
/// count as hull.
Sprite sprite_from_half(std::span<const double> half, SpriteShape shape);

}  // namespace delenox
