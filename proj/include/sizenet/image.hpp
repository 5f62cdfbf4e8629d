#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sizenet {

// Axis-aligned pixel rectangle, row/col of the top-left corner.
struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
};

// Square grayscale image with pixel values in [0, 1], row-major.
struct GrayImage {
  int side = 0;
  std::vector<double> pixels;

  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * side + c]; }
  double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * side + c]; }
};

// Simulator product: the image plus where its propensity cue was painted.
struct SyntheticImage {
  GrayImage image;
  Rect cue_region;
};

// ASCII (P2) PGM with maxval 255. Values are clamped to [0, 1] and
// quantized to 8 bits on write.
void write_pgm(const std::string& path, const GrayImage& img);
GrayImage read_pgm(const std::string& path);

}  // namespace sizenet
