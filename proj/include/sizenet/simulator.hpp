#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sizenet/events.hpp"
#include "sizenet/image.hpp"

namespace sizenet {

struct SimConfig {
  int n_categories = 3;
  int articles_per_category = 200;
  double mean_sales_per_article = 200.0;
  // Per-category propensity means; empty = evenly spread over [0.15, 0.35].
  std::vector<double> category_base_rates;
  // Beta concentration around the category mean; higher = tighter.
  double propensity_spread = 6.0;
  double coldstart_fraction = 0.3;
  long coldstart_max_sales = 3;
  int horizon_days = 120;
  int image_side = 32;
  // Mean lag in days between a sale and its return.
  double mean_return_lag = 14.0;
  std::uint64_t seed = 1;

  void validate() const;
  double base_rate(int category) const;
};

struct GroundTruth {
  ArticleId article;
  double q = 0.0;      // per-article size-issue propensity
  int true_label = 0;  // 1 when q exceeds the category's realized mean
};

struct SimOutput {
  std::vector<SaleEvent> sales;      // sorted by (day, article)
  std::vector<ReturnEvent> returns;  // sorted by (day, article)
  std::vector<GroundTruth> truths;   // sorted by article
  std::map<ArticleId, SyntheticImage> images;
};

// Draws a catalog of articles with latent propensities q ~ Beta around the
// category base rate, a sales/returns event history over the horizon, and
// one synthetic image per article whose cue patch encodes q. Every random
// choice hangs off a per-article sub-seed, so one article's schedule never
// perturbs another's.
SimOutput simulate(const SimConfig& cfg);

// The image for one article: background noise in [0, 0.2] plus a cue patch
// of intensity 0.3 + 0.7 q at a category-determined location. Deterministic
// in (cfg.seed, article id).
SyntheticImage render_image(const ArticleId& id, const GroundTruth& truth,
                            int category_index, const SimConfig& cfg);

std::string category_name(int index);

}  // namespace sizenet
