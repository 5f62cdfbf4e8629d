#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace sizenet {

// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable sub-seed for a named pipeline stage. One global seed fans out to
// per-stage seeds ("simulate", "train", "article:xyz", ...) so each stage
// draws from an independent stream no matter how the others are reordered.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ mix64(h));
}

// mt19937_64 with explicit, hand-rolled transforms on top. The standard
// fixes the engine's output bit-for-bit but not the distributions', so all
// sampling here avoids <random> distribution objects to stay reproducible
// across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = ~0ULL - ~0ULL % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller, one value per call (no cached spare).
  double normal() {
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Poisson by sequential CDF inversion; exact for the event rates used
  // here (exp(-lambda) stays normal for lambda up to ~700).
  long poisson(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("poisson: negative rate");
    if (lambda == 0.0) return 0;
    const double u = uniform01();
    double term = std::exp(-lambda);
    double cdf = term;
    long k = 0;
    while (u > cdf) {
      ++k;
      term *= lambda / static_cast<double>(k);
      cdf += term;
      if (k > 100000000) break;
    }
    return k;
  }

  // Number of Bernoulli(p) trials up to and including the first success;
  // support {1, 2, ...}, mean 1/p.
  long geometric1(double p) {
    if (!(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("geometric1: p must be in (0, 1]");
    if (p == 1.0) return 1;
    const double u = uniform01();
    const long g =
        1 + static_cast<long>(std::floor(std::log1p(-u) / std::log1p(-p)));
    return g < 1 ? 1 : g;
  }

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 boosted through
  // the Gamma(shape + 1) power trick.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape <= 0");
    if (shape < 1.0) {
      double u = uniform01();
      if (u <= 0.0) u = 0x1.0p-53;
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform01();
      if (u <= 0.0) u = 0x1.0p-53;
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    const double sum = x + y;
    if (sum <= 0.0) return 0.5;
    return x / sum;
  }

  // Fisher-Yates, driven by below() so the permutation law is exact.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sizenet
