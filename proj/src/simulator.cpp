#include "sizenet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sizenet/rng.hpp"

namespace sizenet {

void SimConfig::validate() const {
  if (n_categories < 1) throw std::invalid_argument("n_categories must be >= 1");
  if (articles_per_category < 1) {
    throw std::invalid_argument("articles_per_category must be >= 1");
  }
  if (!(mean_sales_per_article > 0.0)) {
    throw std::invalid_argument("mean_sales_per_article must be > 0");
  }
  if (!category_base_rates.empty() &&
      category_base_rates.size() != static_cast<std::size_t>(n_categories)) {
    throw std::invalid_argument(
        "category_base_rates must be empty or have one entry per category");
  }
  for (double r : category_base_rates) {
    if (!(r > 0.0 && r < 1.0)) {
      throw std::invalid_argument("category base rates must be inside (0, 1)");
    }
  }
  if (!(propensity_spread > 0.0)) {
    throw std::invalid_argument("propensity_spread must be > 0");
  }
  if (!(coldstart_fraction >= 0.0 && coldstart_fraction <= 1.0)) {
    throw std::invalid_argument("coldstart_fraction must be in [0, 1]");
  }
  if (coldstart_max_sales < 0) {
    throw std::invalid_argument("coldstart_max_sales must be >= 0");
  }
  if (horizon_days < 1) throw std::invalid_argument("horizon_days must be >= 1");
  if (image_side < 4) throw std::invalid_argument("image_side must be >= 4");
  if (!(mean_return_lag >= 1.0)) {
    throw std::invalid_argument("mean_return_lag must be >= 1");
  }
}

double SimConfig::base_rate(int category) const {
  if (category < 0 || category >= n_categories) {
    throw std::invalid_argument("category index out of range");
  }
  if (!category_base_rates.empty()) return category_base_rates[category];
  if (n_categories == 1) return 0.25;
  return 0.15 + 0.20 * category / (n_categories - 1);
}

std::string category_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "cat%02d", index);
  return buf;
}

namespace {

std::string article_name(int category, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-a%04d", category_name(category).c_str(),
                index);
  return buf;
}

}  // namespace

SyntheticImage render_image(const ArticleId& id, const GroundTruth& truth,
                            int category_index, const SimConfig& cfg) {
  if (truth.article != id) {
    throw std::invalid_argument("render_image: truth belongs to '" +
                                truth.article + "', not '" + id + "'");
  }
  const int side = cfg.image_side;
  SyntheticImage out;
  out.image.side = side;
  out.image.pixels.resize(static_cast<std::size_t>(side) * side);

  Rng rng(derive_seed(cfg.seed, "image:" + id));
  for (auto& px : out.image.pixels) px = rng.uniform(0.0, 0.2);

  // Cue patch: quarter-side square on a 3x3 anchor grid, the anchor chosen
  // by category so distinct categories place the cue in distinct spots.
  const int cue = std::max(2, side / 4);
  const int step = (side - cue) / 2;
  const int slot = category_index % 9;
  out.cue_region = {slot / 3 * step, slot % 3 * step, cue, cue};

  const double intensity = 0.3 + 0.7 * truth.q;
  for (int r = 0; r < cue; ++r) {
    for (int c = 0; c < cue; ++c) {
      out.image.at(out.cue_region.row + r, out.cue_region.col + c) = intensity;
    }
  }
  return out;
}

SimOutput simulate(const SimConfig& cfg) {
  cfg.validate();
  SimOutput out;

  for (int cat = 0; cat < cfg.n_categories; ++cat) {
    const std::string category = category_name(cat);
    const double mu = cfg.base_rate(cat);
    const double kappa = cfg.propensity_spread;
    const std::size_t cat_begin = out.truths.size();

    for (int a = 0; a < cfg.articles_per_category; ++a) {
      const ArticleId id = article_name(cat, a);
      Rng rng(derive_seed(cfg.seed, "article:" + id));

      GroundTruth truth;
      truth.article = id;
      truth.q = std::clamp(rng.beta(mu * kappa, (1.0 - mu) * kappa), 1e-12,
                           1.0 - 1e-12);

      const bool coldstart = rng.uniform01() < cfg.coldstart_fraction;
      long n_sales = rng.poisson(cfg.mean_sales_per_article);
      if (coldstart) n_sales = std::min(n_sales, cfg.coldstart_max_sales);

      for (long s = 0; s < n_sales; ++s) {
        const int day = static_cast<int>(rng.below(cfg.horizon_days));
        out.sales.push_back({id, category, day});
        if (rng.uniform01() < truth.q) {
          const long lag = rng.geometric1(1.0 / cfg.mean_return_lag);
          const int back_day = static_cast<int>(
              std::min<long>(day + lag, cfg.horizon_days - 1));
          out.returns.push_back({id, back_day, ReturnReason::size_issue});
        }
      }
      out.truths.push_back(std::move(truth));
    }

    // True labels split the category at its realized mean propensity.
    double mean_q = 0.0;
    for (std::size_t i = cat_begin; i < out.truths.size(); ++i) {
      mean_q += out.truths[i].q;
    }
    mean_q /= static_cast<double>(out.truths.size() - cat_begin);
    for (std::size_t i = cat_begin; i < out.truths.size(); ++i) {
      out.truths[i].true_label = out.truths[i].q > mean_q ? 1 : 0;
      out.images[out.truths[i].article] =
          render_image(out.truths[i].article, out.truths[i], cat, cfg);
    }
  }

  std::stable_sort(out.sales.begin(), out.sales.end(),
                   [](const SaleEvent& a, const SaleEvent& b) {
                     return a.day != b.day ? a.day < b.day
                                           : a.article < b.article;
                   });
  std::stable_sort(out.returns.begin(), out.returns.end(),
                   [](const ReturnEvent& a, const ReturnEvent& b) {
                     return a.day != b.day ? a.day < b.day
                                           : a.article < b.article;
                   });
  return out;
}

}  // namespace sizenet
