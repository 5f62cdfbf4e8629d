#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sizenet/events.hpp"
#include "sizenet/mlp.hpp"
#include "sizenet/simulator.hpp"

namespace sizenet {

struct SplitSpec {
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  std::optional<std::uint64_t> seed;  // default: derived from the run seed

  void validate() const;
};

struct MetricsOptions {
  // Quantiles of the test-set weight distribution used as tau thresholds.
  std::vector<double> tau_quantiles = {0.0, 0.1, 0.2, 0.3, 0.4,
                                       0.5, 0.6, 0.7, 0.8, 0.9};
  std::optional<double> w_split;  // default: median test weight
  long coldstart_max_sales = 5;
};

struct SaliencyOptions {
  int n_masks = 1000;
  int grid_h = 8;
  int grid_w = 8;
  double p_keep = 0.5;
  std::string fill = "zero";  // zero | background
  double top_q = 0.1;         // fraction of pixels ranked for localization
  int top_tp = 5;             // default article selection for explain
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  SimConfig sim;
  // Observation window; end < 0 means horizon_days - 1.
  int window_start = 0;
  int window_end = -1;
  int min_age_days = 0;
  int feature_dim = 128;
  bool standardize = false;
  std::optional<std::string> embeddings;  // skip images, load features
  TrainConfig train;
  SplitSpec split;
  MetricsOptions metrics;
  SaliencyOptions saliency;

  DayWindow window() const;
  void validate() const;
};

// Flat `key = value` file with [section] headers and # comments. Unknown
// sections or keys are errors, as are malformed values. Empty path gives
// the defaults.
PipelineConfig load_config(const std::optional<std::string>& path);

// Disjoint train/val/test split of the sorted article universe: counts by
// rounded fractions, assignment by seeded shuffle.
struct Split {
  std::vector<ArticleId> train;
  std::vector<ArticleId> val;
  std::vector<ArticleId> test;
};
Split make_split(std::vector<ArticleId> ids, const SplitSpec& spec,
                 std::uint64_t seed);

// Command entry points, one per CLI verb. Each reads and writes artifacts
// under cfg.out_dir and returns a small summary (also printed to stdout).

struct SimulateSummary {
  long articles = 0;
  long sales = 0;
  long returns = 0;
};
SimulateSummary cmd_simulate(const PipelineConfig& cfg);

struct LabelSummary {
  long size_issue = 0;
  long no_size_issue = 0;
};
LabelSummary cmd_label(const PipelineConfig& cfg);

struct TrainSummary {
  long train_size = 0;
  long val_size = 0;
  long test_size = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
};
TrainSummary cmd_train(const PipelineConfig& cfg);

struct EvaluateSummary {
  long test_size = 0;
  double auc = 0.0;
  double ap = 0.0;
  long confident_disagreement = 0;
  std::optional<double> coldstart_accuracy;
};
EvaluateSummary cmd_evaluate(const PipelineConfig& cfg);

struct ExplainSummary {
  long images = 0;
  std::optional<double> mean_localization;
};
// Explains the given article ids, or with an empty list the top
// cfg.saliency.top_tp correct positives by student score on the test split.
ExplainSummary cmd_explain(const PipelineConfig& cfg,
                           const std::vector<ArticleId>& ids);

// simulate -> label -> train -> evaluate -> explain, sharing one config.
EvaluateSummary cmd_pipeline(const PipelineConfig& cfg);

}  // namespace sizenet
