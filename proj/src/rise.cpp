#include "sizenet/rise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sizenet/rng.hpp"

namespace sizenet {

namespace {

double lerp(double a, double b, double t) { return a + t * (b - a); }

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

MaskSet generate_masks(int n, int grid_h, int grid_w, double p_keep,
                       int height, int width, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_masks: need n >= 1");
  if (height < 1 || width < 1) {
    throw std::invalid_argument("generate_masks: bad image dims");
  }
  if (grid_h < 1 || grid_h > height || grid_w < 1 || grid_w > width) {
    throw std::invalid_argument("generate_masks: grid must fit the image");
  }
  if (!(p_keep > 0.0 && p_keep < 1.0)) {
    throw std::invalid_argument("generate_masks: p_keep strictly inside (0, 1)");
  }

  MaskSet set;
  set.height = height;
  set.width = width;
  set.grid_h = grid_h;
  set.grid_w = grid_w;
  set.p_keep = p_keep;
  set.masks.reserve(n);

  const int cell_h = ceil_div(height, grid_h);
  const int cell_w = ceil_div(width, grid_w);
  // Upsample target: one cell larger than the image, so a random crop
  // offset inside one cell always stays in bounds.
  const int up_h = height + cell_h;
  const int up_w = width + cell_w;

  Rng rng(seed);
  std::vector<double> grid(static_cast<std::size_t>(grid_h) * grid_w);

  for (int m = 0; m < n; ++m) {
    for (auto& g : grid) g = rng.uniform01() < p_keep ? 1.0 : 0.0;
    const int off_r = static_cast<int>(rng.below(cell_h));
    const int off_c = static_cast<int>(rng.below(cell_w));

    std::vector<double> mask(static_cast<std::size_t>(height) * width);
    for (int r = 0; r < height; ++r) {
      // Source coordinate of canvas row r + off_r under linear resize of
      // the grid to (up_h, up_w), pixel centers aligned.
      double u = (r + off_r + 0.5) * grid_h / up_h - 0.5;
      u = std::clamp(u, 0.0, static_cast<double>(grid_h - 1));
      const int r0 = static_cast<int>(u);
      const int r1 = std::min(r0 + 1, grid_h - 1);
      const double fr = u - r0;
      for (int c = 0; c < width; ++c) {
        double v = (c + off_c + 0.5) * grid_w / up_w - 0.5;
        v = std::clamp(v, 0.0, static_cast<double>(grid_w - 1));
        const int c0 = static_cast<int>(v);
        const int c1 = std::min(c0 + 1, grid_w - 1);
        const double fc = v - c0;
        const double top = lerp(grid[static_cast<std::size_t>(r0) * grid_w + c0],
                                grid[static_cast<std::size_t>(r0) * grid_w + c1], fc);
        const double bot = lerp(grid[static_cast<std::size_t>(r1) * grid_w + c0],
                                grid[static_cast<std::size_t>(r1) * grid_w + c1], fc);
        mask[static_cast<std::size_t>(r) * width + c] = lerp(top, bot, fr);
      }
    }
    set.masks.push_back(std::move(mask));
  }
  return set;
}

SaliencyMap rise_map(const ScoreFn& score, const GrayImage& img,
                     const MaskSet& masks, double fill) {
  if (!score) throw std::invalid_argument("rise_map: empty score function");
  if (img.side != masks.height || img.side != masks.width) {
    throw std::invalid_argument("rise_map: mask dims do not match image");
  }
  if (masks.masks.empty()) throw std::invalid_argument("rise_map: no masks");

  const std::size_t n_px = img.pixels.size();
  SaliencyMap out;
  out.height = masks.height;
  out.width = masks.width;
  out.values.assign(n_px, 0.0);

  std::vector<double> masked(n_px);
  for (const auto& mask : masks.masks) {
    for (std::size_t j = 0; j < n_px; ++j) {
      masked[j] = img.pixels[j] * mask[j] + fill * (1.0 - mask[j]);
    }
    const double sc = score(masked);
    for (std::size_t j = 0; j < n_px; ++j) out.values[j] += sc * mask[j];
  }

  const double norm =
      1.0 / (static_cast<double>(masks.masks.size()) * masks.p_keep);
  for (auto& v : out.values) v *= norm;
  return out;
}

double localization_score(const SaliencyMap& map, const Rect& region,
                          double q) {
  if (map.height < 1 || map.width < 1 ||
      map.values.size() !=
          static_cast<std::size_t>(map.height) * map.width) {
    throw std::invalid_argument("localization_score: inconsistent map");
  }
  if (region.row < 0 || region.col < 0 || region.height < 1 ||
      region.width < 1 || region.row + region.height > map.height ||
      region.col + region.width > map.width) {
    throw std::invalid_argument("localization_score: region out of bounds");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("localization_score: q must be in (0, 1]");
  }

  const std::size_t n_px = map.values.size();
  const auto top = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(n_px)));

  std::vector<std::size_t> order(n_px);
  std::iota(order.begin(), order.end(), 0);
  // value descending, pixel index ascending on ties
  std::stable_sort(order.begin(), order.end(),
                   [&map](std::size_t a, std::size_t b) {
                     return map.values[a] > map.values[b];
                   });

  long inside = 0;
  for (std::size_t i = 0; i < top; ++i) {
    const int r = static_cast<int>(order[i]) / map.width;
    const int c = static_cast<int>(order[i]) % map.width;
    if (r >= region.row && r < region.row + region.height &&
        c >= region.col && c < region.col + region.width) {
      ++inside;
    }
  }
  return static_cast<double>(inside) / static_cast<double>(top);
}

}  // namespace sizenet
