#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sizenet/image.hpp"

namespace sizenet {

// Random occlusion masks in [0, 1], one flat height x width grid per mask.
struct MaskSet {
  int height = 0;
  int width = 0;
  int grid_h = 0;
  int grid_w = 0;
  double p_keep = 0.5;
  std::vector<std::vector<double>> masks;
};

// Bernoulli(p_keep) cell grids, bilinearly upsampled to a canvas one cell
// larger than the image and cropped at a random integer offset inside that
// cell. Values stay in [0, 1]; cells are kept independently, so the
// expected mask value is p_keep everywhere.
MaskSet generate_masks(int n, int grid_h, int grid_w, double p_keep,
                       int height, int width, std::uint64_t seed);

// Scores a masked image; input is the flat masked pixel grid.
using ScoreFn = std::function<double(std::span<const double>)>;

struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;
};

// Importance by randomized masking:
//   S = (1 / (N p_keep)) sum_i score(img * M_i + fill * (1 - M_i)) * M_i
// evaluated in mask order, so the result is deterministic in the mask set.
SaliencyMap rise_map(const ScoreFn& score, const GrayImage& img,
                     const MaskSet& masks, double fill = 0.0);

// Fraction of the top ceil(q * H * W) saliency pixels (ties broken by
// pixel index) that fall inside `region`.
double localization_score(const SaliencyMap& map, const Rect& region,
                          double q);

}  // namespace sizenet
