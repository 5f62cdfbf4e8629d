#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "sizenet/featurizer.hpp"
#include "sizenet/metrics.hpp"
#include "sizenet/mlp.hpp"
#include "sizenet/pipeline.hpp"
#include "sizenet/rise.hpp"
#include "sizenet/teacher.hpp"

namespace py = pybind11;
using namespace sizenet;

namespace {

PipelineConfig resolve_config(const std::optional<std::string>& config,
                              std::optional<std::uint64_t> seed,
                              const std::optional<std::string>& out_dir) {
  PipelineConfig cfg = load_config(config);
  if (seed) cfg.seed = *seed;
  if (out_dir) cfg.out_dir = *out_dir;
  return cfg;
}

std::vector<LabeledExample> build_examples(
    const std::vector<std::vector<double>>& features,
    const std::vector<int>& labels, const std::vector<double>& weights) {
  if (features.size() != labels.size() || features.size() != weights.size()) {
    throw std::invalid_argument("features, labels and weights must align");
  }
  std::vector<LabeledExample> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.push_back({"row" + std::to_string(i), features[i], labels[i],
                   weights[i]});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "weak-supervision lab for size-issue prediction";

  // teacher
  m.def("log_likelihood", &log_likelihood, py::arg("n"), py::arg("k"),
        py::arg("p"));
  m.def("confidence_score", &confidence_score, py::arg("n"), py::arg("k"),
        py::arg("p"));
  m.def("assign_label", &assign_label, py::arg("n"), py::arg("k"), py::arg("p"));
  m.def("sample_weight", &sample_weight, py::arg("s"));
  m.def("kl_asymptote", &kl_asymptote, py::arg("n"), py::arg("k"), py::arg("p"));
  m.def(
      "score_bounds",
      [](long n, double p) {
        const ScoreBounds b = score_bounds(n, p);
        return py::make_tuple(b.high_rate, b.low_rate);
      },
      py::arg("n"), py::arg("p"));

  // metrics
  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        auto [curve, auc] = roc_auc(scores, labels);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : curve) pts.emplace_back(p.fpr, p.tpr);
        return py::make_tuple(pts, auc);
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "pr_ap",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        auto [curve, ap] = pr_ap(scores, labels);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : curve) pts.emplace_back(p.recall, p.precision);
        return py::make_tuple(pts, ap);
      },
      py::arg("scores"), py::arg("labels"));
  m.def("weighted_bce", &weighted_bce, py::arg("y_hat"), py::arg("y"),
        py::arg("w"));

  // featurizer
  py::class_<ProjectionSpec>(m, "ProjectionSpec")
      .def(py::init([](int input_dim, int output_dim, std::uint64_t seed) {
             return ProjectionSpec{input_dim, output_dim, seed};
           }),
           py::arg("input_dim"), py::arg("output_dim"), py::arg("seed"))
      .def_readonly("input_dim", &ProjectionSpec::input_dim)
      .def_readonly("output_dim", &ProjectionSpec::output_dim)
      .def_readonly("seed", &ProjectionSpec::seed);
  py::class_<RandomProjection>(m, "RandomProjection")
      .def(py::init<const ProjectionSpec&>(), py::arg("spec"))
      .def("apply",
           [](const RandomProjection& p, const std::vector<double>& x) {
             return p.apply(x);
           },
           py::arg("x"))
      .def_property_readonly("spec", &RandomProjection::spec);

  // student
  py::class_<MLPModel>(m, "Model")
      .def_readonly("layer_dims", &MLPModel::layer_dims)
      .def_readonly("dropout_rate", &MLPModel::dropout_rate)
      .def("predict",
           [](const MLPModel& model, const std::vector<double>& x) {
             return predict(model, x);
           },
           py::arg("features"))
      .def("predict_many",
           [](const MLPModel& model,
              const std::vector<std::vector<double>>& xs) {
             std::vector<double> out;
             out.reserve(xs.size());
             for (const auto& x : xs) out.push_back(predict(model, x));
             return out;
           },
           py::arg("features"))
      .def("save",
           [](const MLPModel& model, const std::string& path) {
             save_model(model, path);
           },
           py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def(
      "train",
      [](const std::vector<std::vector<double>>& features,
         const std::vector<int>& labels, const std::vector<double>& weights,
         double learning_rate, int batch_size, int epochs, std::uint64_t seed,
         bool use_weights, std::vector<double> curriculum_fractions,
         double dropout_rate) {
        TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.batch_size = batch_size;
        cfg.epochs = epochs;
        cfg.seed = seed;
        cfg.use_weights = use_weights;
        cfg.curriculum_fractions = std::move(curriculum_fractions);
        cfg.dropout_rate = dropout_rate;
        TrainResult result =
            train(build_examples(features, labels, weights), cfg);
        return py::make_tuple(std::move(result.model), result.history);
      },
      py::arg("features"), py::arg("labels"), py::arg("weights"),
      py::arg("learning_rate") = 0.05, py::arg("batch_size") = 64,
      py::arg("epochs") = 30, py::arg("seed") = 1,
      py::arg("use_weights") = true,
      py::arg("curriculum_fractions") =
          std::vector<double>{1.0 / 3.0, 2.0 / 3.0, 1.0},
      py::arg("dropout_rate") = 0.5);

  // saliency
  py::class_<MaskSet>(m, "MaskSet")
      .def_readonly("height", &MaskSet::height)
      .def_readonly("width", &MaskSet::width)
      .def_readonly("p_keep", &MaskSet::p_keep)
      .def_readonly("masks", &MaskSet::masks);
  m.def("generate_masks", &generate_masks, py::arg("n"), py::arg("grid_h"),
        py::arg("grid_w"), py::arg("p_keep"), py::arg("height"),
        py::arg("width"), py::arg("seed"));
  m.def(
      "rise_map",
      [](const std::function<double(std::vector<double>)>& score, int side,
         const std::vector<double>& pixels, const MaskSet& masks, double fill) {
        GrayImage img;
        img.side = side;
        img.pixels = pixels;
        const SaliencyMap map = rise_map(
            [&score](std::span<const double> x) {
              return score(std::vector<double>(x.begin(), x.end()));
            },
            img, masks, fill);
        return map.values;
      },
      py::arg("score"), py::arg("side"), py::arg("pixels"), py::arg("masks"),
      py::arg("fill") = 0.0);
  m.def(
      "localization_score",
      [](const std::vector<double>& values, int height, int width, int row,
         int col, int rect_height, int rect_width, double q) {
        SaliencyMap map;
        map.height = height;
        map.width = width;
        map.values = values;
        return localization_score(map, {row, col, rect_height, rect_width}, q);
      },
      py::arg("values"), py::arg("height"), py::arg("width"), py::arg("row"),
      py::arg("col"), py::arg("rect_height"), py::arg("rect_width"),
      py::arg("q"));

  // pipeline commands
  m.def(
      "simulate",
      [](std::optional<std::string> config, std::optional<std::uint64_t> seed,
         std::optional<std::string> out_dir) {
        const auto s = cmd_simulate(resolve_config(config, seed, out_dir));
        return py::make_tuple(s.articles, s.sales, s.returns);
      },
      py::arg("config") = std::nullopt, py::arg("seed") = std::nullopt,
      py::arg("out_dir") = std::nullopt);
  m.def(
      "label",
      [](std::optional<std::string> config, std::optional<std::uint64_t> seed,
         std::optional<std::string> out_dir) {
        const auto s = cmd_label(resolve_config(config, seed, out_dir));
        return py::make_tuple(s.size_issue, s.no_size_issue);
      },
      py::arg("config") = std::nullopt, py::arg("seed") = std::nullopt,
      py::arg("out_dir") = std::nullopt);
  m.def(
      "run_pipeline",
      [](std::optional<std::string> config, std::optional<std::uint64_t> seed,
         std::optional<std::string> out_dir) {
        const auto s = cmd_pipeline(resolve_config(config, seed, out_dir));
        py::dict d;
        d["test_size"] = s.test_size;
        d["auc"] = s.auc;
        d["ap"] = s.ap;
        d["confident_disagreement"] = s.confident_disagreement;
        if (s.coldstart_accuracy) d["coldstart_accuracy"] = *s.coldstart_accuracy;
        return d;
      },
      py::arg("config") = std::nullopt, py::arg("seed") = std::nullopt,
      py::arg("out_dir") = std::nullopt);
}
