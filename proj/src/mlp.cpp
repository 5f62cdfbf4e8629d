#include "sizenet/mlp.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "sizenet/rng.hpp"

namespace sizenet {

namespace {

constexpr std::array<int, 4> kHiddenDims{256, 128, 64, 32};
constexpr double kProbEps = 1e-12;  // keeps predict strictly inside (0, 1)
constexpr double kBceEps = 1e-7;

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Per-example forward state kept for backpropagation.
struct Trace {
  std::vector<std::vector<double>> a;      // activations, a[0] = input
  std::vector<std::vector<double>> z;      // pre-activations per layer
  std::vector<std::vector<double>> scale;  // dropout factor per hidden unit
};

void resize_trace(Trace& t, const std::vector<int>& dims) {
  const std::size_t layers = dims.size() - 1;
  t.a.resize(dims.size());
  t.z.resize(layers);
  t.scale.resize(layers);  // last entry unused (output layer has no dropout)
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    t.a[l].resize(dims[l]);
    t.z[l].resize(dims[l + 1]);
    t.scale[l].resize(dims[l + 1]);
  }
  t.a.back().resize(dims.back());
}

// Runs one example through the net. dropout_rng == nullptr is eval mode;
// in training mode each hidden unit is dropped with probability
// m.dropout_rate and survivors are scaled by 1/(1 - rate).
double run_forward(const MLPModel& m, std::span<const double> x,
                   Rng* dropout_rng, Trace& t) {
  const auto& dims = m.layer_dims;
  const std::size_t layers = dims.size() - 1;
  std::copy(x.begin(), x.end(), t.a[0].begin());

  const double rate = m.dropout_rate;
  const double inv_keep = rate < 1.0 ? 1.0 / (1.0 - rate) : 0.0;

  for (std::size_t l = 0; l < layers; ++l) {
    const int in_dim = dims[l];
    const int out_dim = dims[l + 1];
    const double* W = m.weights[l].data();
    const double* prev = t.a[l].data();
    for (int u = 0; u < out_dim; ++u) {
      const double* row = W + static_cast<std::size_t>(u) * in_dim;
      double acc = m.biases[l][u];
      for (int i = 0; i < in_dim; ++i) acc += row[i] * prev[i];
      t.z[l][u] = acc;
    }
    if (l + 1 < layers) {
      for (int u = 0; u < out_dim; ++u) {
        double h = t.z[l][u] > 0.0 ? t.z[l][u] : 0.0;
        double sc = 1.0;
        if (dropout_rng != nullptr) {
          sc = dropout_rng->uniform01() < rate ? 0.0 : inv_keep;
        }
        t.scale[l][u] = sc;
        t.a[l + 1][u] = h * sc;
      }
    }
  }
  return std::clamp(sigmoid(t.z[layers - 1][0]), kProbEps, 1.0 - kProbEps);
}

void resize_gradients(Gradients& g, const MLPModel& m) {
  g.weights.resize(m.weights.size());
  g.biases.resize(m.biases.size());
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    g.weights[l].assign(m.weights[l].size(), 0.0);
    g.biases[l].assign(m.biases[l].size(), 0.0);
  }
}

// Adds this example's contribution (already scaled by coeff) to g.
// coeff folds in the example weight and the 1/B batch mean.
void backprop_example(const MLPModel& m, const Trace& t, double y_hat, int y,
                      double coeff, Gradients& g,
                      std::vector<double>& delta, std::vector<double>& carry) {
  const auto& dims = m.layer_dims;
  const std::size_t layers = dims.size() - 1;

  // d(loss)/d(z_out) for BCE through sigmoid collapses to y_hat - y.
  delta.assign(1, coeff * (y_hat - static_cast<double>(y)));

  for (std::size_t l = layers; l-- > 0;) {
    const int in_dim = dims[l];
    const int out_dim = dims[l + 1];
    const double* prev = t.a[l].data();
    for (int u = 0; u < out_dim; ++u) {
      const double d = delta[u];
      if (d == 0.0) continue;
      double* grow = g.weights[l].data() + static_cast<std::size_t>(u) * in_dim;
      for (int i = 0; i < in_dim; ++i) grow[i] += d * prev[i];
      g.biases[l][u] += d;
    }
    if (l == 0) break;

    carry.assign(in_dim, 0.0);
    const double* W = m.weights[l].data();
    for (int u = 0; u < out_dim; ++u) {
      const double d = delta[u];
      if (d == 0.0) continue;
      const double* row = W + static_cast<std::size_t>(u) * in_dim;
      for (int i = 0; i < in_dim; ++i) carry[i] += row[i] * d;
    }
    // Back through dropout scaling and the ReLU gate.
    for (int i = 0; i < in_dim; ++i) {
      carry[i] *= t.scale[l - 1][i];
      if (t.z[l - 1][i] <= 0.0) carry[i] = 0.0;
    }
    delta = carry;
  }
}

}  // namespace

void MLPModel::check_shapes() const {
  if (layer_dims.size() < 2) {
    throw std::runtime_error("model needs at least input and output dims");
  }
  for (int d : layer_dims) {
    if (d < 1) throw std::runtime_error("model layer dim must be >= 1");
  }
  const std::size_t layers = layer_dims.size() - 1;
  if (weights.size() != layers || biases.size() != layers) {
    throw std::runtime_error("model has wrong layer count");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = static_cast<std::size_t>(layer_dims[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(layer_dims[l]);
    if (weights[l].size() != rows * cols || biases[l].size() != rows) {
      throw std::runtime_error("model layer " + std::to_string(l) +
                               " has inconsistent parameter shapes");
    }
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::runtime_error("model dropout rate must be in [0, 1)");
  }
}

MLPModel init_model(int input_dim, double dropout_rate, std::uint64_t seed) {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("dropout_rate must be in [0, 1)");
  }
  MLPModel m;
  m.dropout_rate = dropout_rate;
  m.layer_dims.push_back(input_dim);
  m.layer_dims.insert(m.layer_dims.end(), kHiddenDims.begin(),
                      kHiddenDims.end());
  m.layer_dims.push_back(1);

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    const int fan_in = m.layer_dims[l];
    const int fan_out = m.layer_dims[l + 1];
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (auto& v : w) v = sd * rng.normal();
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

double predict(const MLPModel& m, std::span<const double> x) {
  m.check_shapes();
  if (x.size() != static_cast<std::size_t>(m.layer_dims.front())) {
    throw std::invalid_argument("predict: input has dim " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(m.layer_dims.front()));
  }
  Trace t;
  resize_trace(t, m.layer_dims);
  return run_forward(m, x, nullptr, t);
}

double weighted_bce(double y_hat, int y, double w) {
  if (!(w >= 0.0)) throw std::invalid_argument("weighted_bce: negative weight");
  if (y != 0 && y != 1) throw std::invalid_argument("weighted_bce: label not 0/1");
  const double p = std::clamp(y_hat, kBceEps, 1.0 - kBceEps);
  return w * -(y == 1 ? std::log(p) : std::log1p(-p));
}

namespace {

// Shared by the public gradients() and the SGD loop: accumulates the
// gradient of the mean loss over the indexed examples, returns the summed
// per-example loss.
double batch_gradients(const MLPModel& m,
                       const std::vector<LabeledExample>& dataset,
                       std::span<const std::size_t> idx, bool use_weights,
                       std::uint64_t mode_seed, Gradients& g) {
  resize_gradients(g, m);
  Rng dropout_rng(mode_seed);
  Rng* rng_ptr = m.dropout_rate > 0.0 ? &dropout_rng : nullptr;

  Trace t;
  resize_trace(t, m.layer_dims);
  std::vector<double> delta, carry;
  const double inv_b = 1.0 / static_cast<double>(idx.size());

  double loss_sum = 0.0;
  for (std::size_t i : idx) {
    const LabeledExample& ex = dataset[i];
    const double w_eff = use_weights ? ex.w : 1.0;
    const double y_hat = run_forward(m, ex.features, rng_ptr, t);
    loss_sum += weighted_bce(y_hat, ex.y, w_eff);
    backprop_example(m, t, y_hat, ex.y, w_eff * inv_b, g, delta, carry);
  }
  return loss_sum;
}

}  // namespace

Gradients gradients(const MLPModel& m, const std::vector<LabeledExample>& batch,
                    std::uint64_t mode_seed) {
  m.check_shapes();
  if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
  for (const auto& ex : batch) {
    if (ex.features.size() != static_cast<std::size_t>(m.layer_dims.front())) {
      throw std::invalid_argument("gradients: feature dim mismatch");
    }
    if (!(ex.w >= 0.0)) throw std::invalid_argument("gradients: negative weight");
  }
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  Gradients g;
  batch_gradients(m, batch, idx, /*use_weights=*/true, mode_seed, g);
  return g;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("dropout_rate must be in [0, 1)");
  }
  if (curriculum_fractions.empty()) {
    throw std::invalid_argument("curriculum_fractions must not be empty");
  }
  double prev = 0.0;
  for (double f : curriculum_fractions) {
    if (!(f > prev && f <= 1.0)) {
      throw std::invalid_argument(
          "curriculum_fractions must be strictly ascending in (0, 1]");
    }
    prev = f;
  }
  if (std::abs(curriculum_fractions.back() - 1.0) > 1e-12) {
    throw std::invalid_argument("last curriculum fraction must be 1");
  }
}

std::vector<std::size_t> curriculum_order(
    const std::vector<LabeledExample>& dataset) {
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&dataset](std::size_t a, std::size_t b) {
    if (dataset[a].w != dataset[b].w) return dataset[a].w > dataset[b].w;
    return dataset[a].article < dataset[b].article;
  });
  return order;
}

std::size_t curriculum_stage_size(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("stage fraction must be in (0, 1]");
  }
  const auto size = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n)));
  return std::min(std::max<std::size_t>(size, 1), n);
}

TrainResult train(const std::vector<LabeledExample>& dataset,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  const std::size_t input_dim = dataset.front().features.size();
  for (const auto& ex : dataset) {
    if (ex.features.size() != input_dim) {
      throw std::invalid_argument("train: inconsistent feature dims");
    }
    if (!(ex.w >= 0.0)) throw std::invalid_argument("train: negative weight");
  }

  TrainResult result;
  result.model = init_model(static_cast<int>(input_dim), cfg.dropout_rate,
                            derive_seed(cfg.seed, "init"));
  MLPModel& model = result.model;

  const std::vector<std::size_t> order = curriculum_order(dataset);
  const std::size_t stages = cfg.curriculum_fractions.size();
  const int base_epochs = cfg.epochs / static_cast<int>(stages);
  const int remainder = cfg.epochs % static_cast<int>(stages);

  Gradients g;
  int epoch_index = 0;
  long step = 0;
  for (std::size_t stage = 0; stage < stages; ++stage) {
    const std::size_t stage_size =
        curriculum_stage_size(cfg.curriculum_fractions[stage], dataset.size());
    const int stage_epochs =
        base_epochs + (stage + 1 == stages ? remainder : 0);

    std::vector<std::size_t> idx(order.begin(), order.begin() + stage_size);
    for (int e = 0; e < stage_epochs; ++e) {
      Rng shuffle_rng(derive_seed(cfg.seed, "shuffle:" + std::to_string(stage) +
                                                ":" + std::to_string(e)));
      shuffle_rng.shuffle(idx);

      double loss_sum = 0.0;
      for (std::size_t begin = 0; begin < idx.size();
           begin += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t end =
            std::min(idx.size(), begin + static_cast<std::size_t>(cfg.batch_size));
        const std::uint64_t mode_seed =
            derive_seed(cfg.seed, "dropout:" + std::to_string(step));
        ++step;
        loss_sum += batch_gradients(
            model, dataset, std::span(idx).subspan(begin, end - begin),
            cfg.use_weights, mode_seed, g);
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
          for (std::size_t j = 0; j < model.weights[l].size(); ++j) {
            model.weights[l][j] -= cfg.learning_rate * g.weights[l][j];
          }
          for (std::size_t j = 0; j < model.biases[l].size(); ++j) {
            model.biases[l][j] -= cfg.learning_rate * g.biases[l][j];
          }
        }
      }
      const double epoch_loss = loss_sum / static_cast<double>(idx.size());
      result.history.push_back(epoch_loss);
      if (on_epoch) on_epoch(epoch_index, model, epoch_loss);
      ++epoch_index;
    }
  }
  return result;
}

namespace {

constexpr char kMagic[8] = {'S', 'I', 'Z', 'E', 'N', 'E', 'T', '1'};

void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_i64(std::string& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct ByteReader {
  const std::string& data;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > data.size()) {
      throw std::runtime_error(path + ": truncated model file");
    }
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data[pos++]);
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++]))
           << (8 * i);
    }
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace

void save_model(const MLPModel& m, const std::string& path) {
  m.check_shapes();
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u8(out, m.projection.has_value() ? 1 : 0);
  if (m.projection) {
    put_i64(out, m.projection->input_dim);
    put_i64(out, m.projection->output_dim);
    put_u64(out, m.projection->seed);
  }
  put_u64(out, m.layer_dims.size());
  for (int d : m.layer_dims) put_i64(out, d);
  put_f64(out, m.dropout_rate);
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    for (double v : m.weights[l]) put_f64(out, v);
    for (double v : m.biases[l]) put_f64(out, v);
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed for " + path);
}

MLPModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());

  if (data.size() < sizeof(kMagic) ||
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    const std::string found = data.substr(0, std::min<std::size_t>(8, data.size()));
    throw std::runtime_error(path + ": bad model magic '" + found +
                             "' (expected SIZENET1)");
  }

  ByteReader r{data, sizeof(kMagic), path};
  MLPModel m;
  if (r.u8() != 0) {
    ProjectionSpec spec;
    spec.input_dim = static_cast<int>(r.i64());
    spec.output_dim = static_cast<int>(r.i64());
    spec.seed = r.u64();
    m.projection = spec;
  }
  const std::uint64_t n_dims = r.u64();
  if (n_dims < 2 || n_dims > 64) {
    throw std::runtime_error(path + ": implausible layer count");
  }
  for (std::uint64_t i = 0; i < n_dims; ++i) {
    m.layer_dims.push_back(static_cast<int>(r.i64()));
  }
  m.dropout_rate = r.f64();
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    const std::size_t rows = static_cast<std::size_t>(m.layer_dims[l + 1]);
    const std::size_t cols = static_cast<std::size_t>(m.layer_dims[l]);
    std::vector<double> w(rows * cols);
    for (auto& v : w) v = r.f64();
    std::vector<double> b(rows);
    for (auto& v : b) v = r.f64();
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  if (r.pos != data.size()) {
    throw std::runtime_error(path + ": trailing bytes in model file");
  }
  m.check_shapes();
  return m;
}

}  // namespace sizenet
