#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "delenox/sprite.hpp"

namespace delenox {

/// 8-bit grayscale raster, row-major, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Hull pixels become black (0), empty pixels white (255).
GrayImage to_image(const Sprite& sprite);
/// Pixels darker than mid-gray become hull.
Sprite to_sprite(const GrayImage& image);

/// Binary PGM (P5, maxval 255).
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

void write_png(const GrayImage& image, const std::filesystem::path& path);

}  // namespace delenox
