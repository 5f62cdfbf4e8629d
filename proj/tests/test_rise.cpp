#include "sizenet/rise.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace sizenet;

namespace {

GrayImage flat_image(int side, double value) {
  GrayImage img;
  img.side = side;
  img.pixels.assign(static_cast<std::size_t>(side) * side, value);
  return img;
}

}  // namespace

TEST_CASE("generate_masks is deterministic and stays in [0, 1]") {
  const auto a = generate_masks(20, 4, 4, 0.5, 12, 12, 31);
  const auto b = generate_masks(20, 4, 4, 0.5, 12, 12, 31);
  REQUIRE(a.masks.size() == 20);
  for (std::size_t m = 0; m < a.masks.size(); ++m) {
    CHECK(a.masks[m] == b.masks[m]);
    for (double v : a.masks[m]) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  const auto c = generate_masks(20, 4, 4, 0.5, 12, 12, 32);
  CHECK(a.masks[0] != c.masks[0]);
}

TEST_CASE("mask values average to p_keep") {
  const auto set = generate_masks(200, 7, 7, 0.5, 21, 21, 5);
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& mask : set.masks) {
    acc = std::accumulate(mask.begin(), mask.end(), acc);
    count += mask.size();
  }
  CHECK(acc / static_cast<double>(count) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("a 1x1 grid upsamples to an exactly constant mask") {
  const auto set = generate_masks(100, 1, 1, 0.9, 8, 8, 17);
  int ones = 0;
  for (const auto& mask : set.masks) {
    const double first = mask.front();
    CHECK((first == 0.0 || first == 1.0));
    for (double v : mask) CHECK(v == first);
    ones += first == 1.0;
  }
  // kept with probability 0.9
  CHECK(ones > 75);
  CHECK(ones < 100);
}

TEST_CASE("generate_masks validates its arguments") {
  CHECK_THROWS_AS(generate_masks(0, 2, 2, 0.5, 8, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_masks(5, 0, 2, 0.5, 8, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_masks(5, 9, 2, 0.5, 8, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_masks(5, 2, 2, 0.0, 8, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_masks(5, 2, 2, 1.0, 8, 8, 1), std::invalid_argument);
}

TEST_CASE("constant scores factor out of the saliency map") {
  const auto set = generate_masks(50, 3, 3, 0.4, 9, 9, 7);
  const auto img = flat_image(9, 0.5);

  const auto zero = rise_map([](std::span<const double>) { return 0.0; }, img, set);
  for (double v : zero.values) CHECK(v == 0.0);

  const double c = 2.0;
  const auto constant =
      rise_map([c](std::span<const double>) { return c; }, img, set);
  // S = c * (mean mask) / p_keep elementwise
  const std::size_t n_px = img.pixels.size();
  for (std::size_t j = 0; j < n_px; ++j) {
    double mean = 0.0;
    for (const auto& mask : set.masks) mean += mask[j];
    mean /= static_cast<double>(set.masks.size());
    CHECK(constant.values[j] ==
          doctest::Approx(c * mean / set.p_keep).epsilon(1e-12));
  }
}

TEST_CASE("saliency is additive in the score function") {
  const auto set = generate_masks(40, 3, 3, 0.5, 9, 9, 23);
  const auto img = flat_image(9, 0.3);

  const ScoreFn f = [](std::span<const double> x) { return x[0] + 0.2; };
  const ScoreFn g = [](std::span<const double> x) { return x[5] * 0.7; };
  const ScoreFn fg = [&](std::span<const double> x) { return f(x) + g(x); };

  const auto sf = rise_map(f, img, set);
  const auto sg = rise_map(g, img, set);
  const auto sfg = rise_map(fg, img, set);
  for (std::size_t j = 0; j < sfg.values.size(); ++j) {
    CHECK(sfg.values[j] ==
          doctest::Approx(sf.values[j] + sg.values[j]).epsilon(1e-12));
  }
}

TEST_CASE("saliency concentrates on the pixels driving the score") {
  const int side = 12;
  GrayImage img = flat_image(side, 0.0);
  const Rect block{3, 6, 3, 3};
  for (int r = 0; r < block.height; ++r) {
    for (int c = 0; c < block.width; ++c) {
      img.at(block.row + r, block.col + c) = 1.0;
    }
  }
  const auto set = generate_masks(400, 4, 4, 0.5, side, side, 11);
  const ScoreFn brightness = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  };
  const auto map = rise_map(brightness, img, set);

  const double chance = static_cast<double>(block.height * block.width) /
                        static_cast<double>(side * side);
  const double got = localization_score(map, block, chance);
  CHECK(got >= 2.0 * chance);
}

TEST_CASE("rise_map validates its inputs") {
  const auto set = generate_masks(5, 2, 2, 0.5, 8, 8, 1);
  const auto img = flat_image(7, 0.5);
  CHECK_THROWS_AS(rise_map([](std::span<const double>) { return 1.0; }, img, set),
                  std::invalid_argument);
  const auto ok = flat_image(8, 0.5);
  CHECK_THROWS_AS(rise_map(ScoreFn{}, ok, set), std::invalid_argument);
  MaskSet empty = set;
  empty.masks.clear();
  CHECK_THROWS_AS(rise_map([](std::span<const double>) { return 1.0; }, ok, empty),
                  std::invalid_argument);
}

TEST_CASE("localization_score picks top pixels with stable ties") {
  SaliencyMap map;
  map.height = 2;
  map.width = 2;
  map.values = {4.0, 3.0, 2.0, 1.0};
  const Rect cell{0, 0, 1, 1};

  CHECK(localization_score(map, cell, 0.25) == 1.0);
  CHECK(localization_score(map, cell, 0.5) == 0.5);
  CHECK(localization_score(map, cell, 1.0) == 0.25);

  const Rect all{0, 0, 2, 2};
  CHECK(localization_score(map, all, 1.0) == 1.0);

  map.values = {1.0, 1.0, 1.0, 1.0};
  // ties broken by pixel index: top-1 is pixel 0
  CHECK(localization_score(map, cell, 0.25) == 1.0);
  const Rect last{1, 1, 1, 1};
  CHECK(localization_score(map, last, 0.25) == 0.0);
}

TEST_CASE("localization_score validates region and quantile") {
  SaliencyMap map;
  map.height = 4;
  map.width = 4;
  map.values.assign(16, 0.5);
  CHECK_THROWS_AS(localization_score(map, {0, 0, 5, 1}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(localization_score(map, {-1, 0, 2, 2}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(localization_score(map, {0, 0, 2, 2}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(localization_score(map, {0, 0, 2, 2}, 1.5),
                  std::invalid_argument);
  map.values.resize(15);
  CHECK_THROWS_AS(localization_score(map, {0, 0, 2, 2}, 0.5),
                  std::invalid_argument);
}
