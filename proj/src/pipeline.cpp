#include "sizenet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sizenet/csv.hpp"
#include "sizenet/rng.hpp"

namespace sizenet {

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0) || val_fraction < 0.0 || test_fraction < 0.0) {
    throw std::invalid_argument("split fractions must be positive");
  }
  const double sum = train_fraction + val_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

DayWindow PipelineConfig::window() const {
  DayWindow w;
  w.start = window_start;
  w.end = window_end < 0 ? sim.horizon_days - 1 : window_end;
  return w;
}

void PipelineConfig::validate() const {
  sim.validate();
  if (window_start < 0) throw std::invalid_argument("window_start must be >= 0");
  if (window_end >= 0 && window_end < window_start) {
    throw std::invalid_argument("window_end before window_start");
  }
  if (min_age_days < 0) throw std::invalid_argument("min_age_days must be >= 0");
  if (feature_dim < 1) throw std::invalid_argument("feature_dim must be >= 1");
  train.validate();
  split.validate();

  double prev = -1.0;
  for (double q : metrics.tau_quantiles) {
    if (!(q >= 0.0 && q <= 1.0) || q <= prev) {
      throw std::invalid_argument(
          "tau_quantiles must be ascending within [0, 1]");
    }
    prev = q;
  }
  if (metrics.tau_quantiles.empty()) {
    throw std::invalid_argument("tau_quantiles must not be empty");
  }
  if (metrics.coldstart_max_sales < 0) {
    throw std::invalid_argument("metrics coldstart_max_sales must be >= 0");
  }

  if (saliency.n_masks < 1) throw std::invalid_argument("n_masks must be >= 1");
  if (saliency.grid_h < 1 || saliency.grid_w < 1) {
    throw std::invalid_argument("saliency grid dims must be >= 1");
  }
  if (!(saliency.p_keep > 0.0 && saliency.p_keep < 1.0)) {
    throw std::invalid_argument("p_keep strictly inside (0, 1)");
  }
  if (saliency.fill != "zero" && saliency.fill != "background") {
    throw std::invalid_argument("saliency fill must be 'zero' or 'background'");
  }
  if (!(saliency.top_q > 0.0 && saliency.top_q <= 1.0)) {
    throw std::invalid_argument("saliency top_q must be in (0, 1]");
  }
  if (saliency.top_tp < 1) throw std::invalid_argument("top_tp must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct ConfigValue {
  std::string where;  // "file:line" for error messages
  std::string text;

  long as_long() const { return parse_long(text, where); }
  double as_double() const { return parse_double(text, where); }
  bool as_bool() const {
    if (text == "true") return true;
    if (text == "false") return false;
    throw std::runtime_error(where + ": expected true/false, got '" + text +
                             "'");
  }
  std::uint64_t as_seed() const {
    const long v = as_long();
    if (v < 0) throw std::runtime_error(where + ": seed must be >= 0");
    return static_cast<std::uint64_t>(v);
  }
  std::vector<double> as_list() const {
    std::vector<double> out;
    for (const auto& field : split_fields(text)) {
      out.push_back(parse_double(trim(field), where));
    }
    return out;
  }
};

// Applies one key. Returns false for keys that do not exist, so the caller
// can fail closed on typos.
bool apply_key(PipelineConfig& cfg, const std::string& section,
               const std::string& key, const ConfigValue& v) {
  if (section == "pipeline") {
    if (key == "seed") return cfg.seed = v.as_seed(), true;
    if (key == "out_dir") return cfg.out_dir = v.text, true;
    return false;
  }
  if (section == "simulator") {
    SimConfig& s = cfg.sim;
    if (key == "n_categories") return s.n_categories = static_cast<int>(v.as_long()), true;
    if (key == "articles_per_category") return s.articles_per_category = static_cast<int>(v.as_long()), true;
    if (key == "mean_sales_per_article") return s.mean_sales_per_article = v.as_double(), true;
    if (key == "category_base_rates") return s.category_base_rates = v.as_list(), true;
    if (key == "propensity_spread") return s.propensity_spread = v.as_double(), true;
    if (key == "coldstart_fraction") return s.coldstart_fraction = v.as_double(), true;
    if (key == "coldstart_max_sales") return s.coldstart_max_sales = v.as_long(), true;
    if (key == "horizon_days") return s.horizon_days = static_cast<int>(v.as_long()), true;
    if (key == "image_side") return s.image_side = static_cast<int>(v.as_long()), true;
    if (key == "mean_return_lag") return s.mean_return_lag = v.as_double(), true;
    return false;
  }
  if (section == "ingest") {
    if (key == "window_start") return cfg.window_start = static_cast<int>(v.as_long()), true;
    if (key == "window_end") return cfg.window_end = static_cast<int>(v.as_long()), true;
    if (key == "min_age_days") return cfg.min_age_days = static_cast<int>(v.as_long()), true;
    return false;
  }
  if (section == "featurizer") {
    if (key == "dim") return cfg.feature_dim = static_cast<int>(v.as_long()), true;
    if (key == "standardize") return cfg.standardize = v.as_bool(), true;
    if (key == "embeddings") return cfg.embeddings = v.text, true;
    return false;
  }
  if (section == "train") {
    TrainConfig& t = cfg.train;
    if (key == "learning_rate") return t.learning_rate = v.as_double(), true;
    if (key == "batch_size") return t.batch_size = static_cast<int>(v.as_long()), true;
    if (key == "epochs") return t.epochs = static_cast<int>(v.as_long()), true;
    if (key == "use_weights") return t.use_weights = v.as_bool(), true;
    if (key == "curriculum_fractions") return t.curriculum_fractions = v.as_list(), true;
    if (key == "dropout_rate") return t.dropout_rate = v.as_double(), true;
    return false;
  }
  if (section == "split") {
    SplitSpec& s = cfg.split;
    if (key == "train_fraction") return s.train_fraction = v.as_double(), true;
    if (key == "val_fraction") return s.val_fraction = v.as_double(), true;
    if (key == "test_fraction") return s.test_fraction = v.as_double(), true;
    if (key == "seed") return s.seed = v.as_seed(), true;
    return false;
  }
  if (section == "metrics") {
    MetricsOptions& m = cfg.metrics;
    if (key == "tau_quantiles") return m.tau_quantiles = v.as_list(), true;
    if (key == "w_split") return m.w_split = v.as_double(), true;
    if (key == "coldstart_max_sales") return m.coldstart_max_sales = v.as_long(), true;
    return false;
  }
  if (section == "saliency") {
    SaliencyOptions& s = cfg.saliency;
    if (key == "n_masks") return s.n_masks = static_cast<int>(v.as_long()), true;
    if (key == "grid_h") return s.grid_h = static_cast<int>(v.as_long()), true;
    if (key == "grid_w") return s.grid_w = static_cast<int>(v.as_long()), true;
    if (key == "p_keep") return s.p_keep = v.as_double(), true;
    if (key == "fill") return s.fill = v.text, true;
    if (key == "top_q") return s.top_q = v.as_double(), true;
    if (key == "top_tp") return s.top_tp = static_cast<int>(v.as_long()), true;
    return false;
  }
  return false;
}

const char* kSections[] = {"pipeline", "simulator", "ingest",  "featurizer",
                           "train",    "split",     "metrics", "saliency"};

}  // namespace

PipelineConfig load_config(const std::optional<std::string>& path) {
  PipelineConfig cfg;
  if (!path) {
    cfg.validate();
    return cfg;
  }

  std::string section;
  for (const auto& line : read_lines(*path)) {
    std::string text = line.text;
    if (const auto hash = text.find('#'); hash != std::string::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;

    const std::string where = *path + ":" + std::to_string(line.number);
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw std::runtime_error(where + ": malformed section header '" + text +
                                 "'");
      }
      section = trim(text.substr(1, text.size() - 2));
      if (std::find_if(std::begin(kSections), std::end(kSections),
                       [&section](const char* s) { return section == s; }) ==
          std::end(kSections)) {
        throw std::runtime_error(where + ": unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(where + ": expected key = value, got '" + text +
                               "'");
    }
    if (section.empty()) {
      throw std::runtime_error(where + ": key outside any [section]");
    }
    const std::string key = trim(text.substr(0, eq));
    const ConfigValue value{where, trim(text.substr(eq + 1))};
    if (!apply_key(cfg, section, key, value)) {
      throw std::runtime_error(where + ": unknown key '" + key + "' in [" +
                               section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

Split make_split(std::vector<ArticleId> ids, const SplitSpec& spec,
                 std::uint64_t seed) {
  spec.validate();
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  const auto n = static_cast<double>(ids.size());
  auto n_train = static_cast<std::size_t>(std::lround(spec.train_fraction * n));
  auto n_val = static_cast<std::size_t>(std::lround(spec.val_fraction * n));
  n_train = std::min(n_train, ids.size());
  n_val = std::min(n_val, ids.size() - n_train);

  Rng rng(seed);
  rng.shuffle(ids);

  Split split;
  split.train.assign(ids.begin(), ids.begin() + n_train);
  split.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  split.test.assign(ids.begin() + n_train + n_val, ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace sizenet
