#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sizenet/events.hpp"
#include "sizenet/featurizer.hpp"

namespace sizenet {

struct LabeledExample {
  ArticleId article;
  std::vector<double> features;
  int y = 0;
  double w = 0.0;
};

// Fully connected net [D, 256, 128, 64, 32, 1]: ReLU on the hidden layers,
// sigmoid on the output, inverted dropout on hidden activations during
// training. Weights are row-major (out x in) per layer.
struct MLPModel {
  std::vector<int> layer_dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  double dropout_rate = 0.5;
  // Projection used to featurize inputs; carried so a saved model can
  // rebuild its featurizer.
  std::optional<ProjectionSpec> projection;

  void check_shapes() const;  // throws on inconsistent dims
};

// He-style init: W ~ N(0, sqrt(2 / fan_in)), biases zero.
MLPModel init_model(int input_dim, double dropout_rate, std::uint64_t seed);

// Eval-mode forward pass; output strictly inside (0, 1).
double predict(const MLPModel& m, std::span<const double> x);

// Loss for one example: w * [-y ln p - (1-y) ln(1-p)] with p clamped to
// [1e-7, 1 - 1e-7]. w must be >= 0.
double weighted_bce(double y_hat, int y, double w);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Exact gradient of the mean per-example loss over the batch, dropout
// sampled in training mode from mode_seed (rate 0 = no dropout).
Gradients gradients(const MLPModel& m, const std::vector<LabeledExample>& batch,
                    std::uint64_t mode_seed);

struct TrainConfig {
  double learning_rate = 0.05;
  int batch_size = 64;
  int epochs = 30;
  std::uint64_t seed = 1;
  bool use_weights = true;
  // Nested curriculum: stage t trains on the top ceil(f_t * N) examples by
  // weight. Must be ascending and end at 1.
  std::vector<double> curriculum_fractions = {1.0 / 3.0, 2.0 / 3.0, 1.0};
  double dropout_rate = 0.5;

  void validate() const;
};

// Heaviest-first presentation order: w descending, article id ascending on
// ties. Returned as indices into the dataset.
std::vector<std::size_t> curriculum_order(
    const std::vector<LabeledExample>& dataset);
std::size_t curriculum_stage_size(double fraction, std::size_t n);

struct TrainResult {
  MLPModel model;
  std::vector<double> history;  // mean train loss per epoch
};

// Minibatch SGD through the curriculum stages. Epochs are split evenly
// across stages (remainder to the last); each epoch reshuffles its stage
// set from a per-(stage, epoch) seed. With use_weights false the loss
// treats every w as 1, but the curriculum still orders by the true w.
// Deterministic in (dataset, config).
using EpochCallback =
    std::function<void(int epoch, const MLPModel& m, double train_loss)>;
TrainResult train(const std::vector<LabeledExample>& dataset,
                  const TrainConfig& cfg,
                  const EpochCallback& on_epoch = nullptr);

// Versioned binary container; round-trips bit-exactly.
void save_model(const MLPModel& m, const std::string& path);
MLPModel load_model(const std::string& path);

}  // namespace sizenet
