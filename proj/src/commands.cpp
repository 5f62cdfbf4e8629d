#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sizenet/csv.hpp"
#include "sizenet/featurizer.hpp"
#include "sizenet/image.hpp"
#include "sizenet/metrics.hpp"
#include "sizenet/mlp.hpp"
#include "sizenet/pipeline.hpp"
#include "sizenet/rise.hpp"
#include "sizenet/rng.hpp"
#include "sizenet/teacher.hpp"

namespace sizenet {

namespace {

namespace fs = std::filesystem;

std::string path_in(const PipelineConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

SimConfig effective_sim(const PipelineConfig& cfg) {
  SimConfig sim = cfg.sim;
  sim.seed = derive_seed(cfg.seed, "simulate");
  return sim;
}

// labels.csv rows: article_id,y,s,w
void write_labels_csv(const std::string& path,
                      const std::vector<WeakLabel>& labels) {
  std::string out;
  for (const auto& l : labels) {
    out += l.article;
    out += ',';
    out += std::to_string(l.y);
    out += ',';
    out += fmt_g9(l.s);
    out += ',';
    out += fmt_g9(l.w);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<WeakLabel> read_labels_csv(const std::string& path) {
  std::vector<WeakLabel> out;
  for (const auto& line : read_lines(path)) {
    const auto fields = split_fields(line.text);
    const std::string where = path + ":" + std::to_string(line.number);
    if (fields.size() != 4 || fields[0].empty()) {
      throw std::runtime_error(where + ": expected article_id,y,s,w in '" +
                               line.text + "'");
    }
    WeakLabel l;
    l.article = fields[0];
    const long y = parse_long(fields[1], where);
    if (y != 0 && y != 1) throw std::runtime_error(where + ": label must be 0/1");
    l.y = static_cast<int>(y);
    l.s = parse_double(fields[2], where);
    l.w = parse_double(fields[3], where);
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<GroundTruth> read_truth_csv(const std::string& path) {
  std::vector<GroundTruth> out;
  for (const auto& line : read_lines(path)) {
    const auto fields = split_fields(line.text);
    const std::string where = path + ":" + std::to_string(line.number);
    if (fields.size() != 3 || fields[0].empty()) {
      throw std::runtime_error(where + ": expected article_id,q,true_label");
    }
    GroundTruth t;
    t.article = fields[0];
    t.q = parse_double(fields[1], where);
    t.true_label = static_cast<int>(parse_long(fields[2], where));
    out.push_back(std::move(t));
  }
  return out;
}

std::map<ArticleId, Rect> read_regions_csv(const std::string& path) {
  std::map<ArticleId, Rect> out;
  for (const auto& line : read_lines(path)) {
    const auto fields = split_fields(line.text);
    const std::string where = path + ":" + std::to_string(line.number);
    if (fields.size() != 5 || fields[0].empty()) {
      throw std::runtime_error(where +
                               ": expected article_id,row,col,height,width");
    }
    Rect r;
    r.row = static_cast<int>(parse_long(fields[1], where));
    r.col = static_cast<int>(parse_long(fields[2], where));
    r.height = static_cast<int>(parse_long(fields[3], where));
    r.width = static_cast<int>(parse_long(fields[4], where));
    out[fields[0]] = r;
  }
  return out;
}

struct FeatureSet {
  std::map<ArticleId, std::vector<double>> features;
  std::optional<ProjectionSpec> projection;
};

std::vector<std::string> sorted_pgm_stems(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("image directory '" + dir + "' not found");
  }
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) throw std::runtime_error("no .pgm images in '" + dir + "'");
  return stems;
}

// Features either from a precomputed embedding table or by projecting the
// image directory. `spec_override` reuses a saved model's projection.
FeatureSet load_features(const PipelineConfig& cfg,
                         const std::optional<ProjectionSpec>& spec_override) {
  FeatureSet out;
  if (cfg.embeddings) {
    out.features = load_embeddings(*cfg.embeddings);
    return out;
  }

  const std::string dir = path_in(cfg, "images");
  const auto stems = sorted_pgm_stems(dir);

  GrayImage first = read_pgm((fs::path(dir) / (stems.front() + ".pgm")).string());
  ProjectionSpec spec;
  if (spec_override) {
    spec = *spec_override;
  } else {
    spec.input_dim = first.side * first.side;
    spec.output_dim = cfg.feature_dim;
    spec.seed = derive_seed(cfg.seed, "projection");
  }
  RandomProjection proj(spec);

  out.projection = spec;
  out.features[stems.front()] = featurize_image(first, proj);
  for (std::size_t i = 1; i < stems.size(); ++i) {
    const GrayImage img =
        read_pgm((fs::path(dir) / (stems[i] + ".pgm")).string());
    out.features[stems[i]] = featurize_image(img, proj);
  }
  return out;
}

// Inner join of labels and features, sorted by article id.
std::vector<LabeledExample> join_examples(
    const std::vector<WeakLabel>& labels,
    const std::map<ArticleId, std::vector<double>>& features) {
  std::map<ArticleId, const WeakLabel*> by_id;
  for (const auto& l : labels) by_id[l.article] = &l;

  std::vector<LabeledExample> out;
  for (const auto& [article, vec] : features) {
    const auto it = by_id.find(article);
    if (it == by_id.end()) continue;
    out.push_back({article, vec, it->second->y, it->second->w});
  }
  if (out.empty()) {
    throw std::runtime_error("no articles have both a label and features");
  }
  return out;
}

// Column statistics over the full joined universe; both train and evaluate
// see the same statistics because they join the same files.
struct FeatureStats {
  std::vector<double> mean, sd;
};

FeatureStats feature_stats(const std::vector<LabeledExample>& examples) {
  const std::size_t dim = examples.front().features.size();
  FeatureStats st;
  st.mean.assign(dim, 0.0);
  st.sd.assign(dim, 0.0);
  for (const auto& ex : examples) {
    for (std::size_t j = 0; j < dim; ++j) st.mean[j] += ex.features[j];
  }
  for (auto& m : st.mean) m /= static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = ex.features[j] - st.mean[j];
      st.sd[j] += d * d;
    }
  }
  for (auto& v : st.sd) {
    v = std::sqrt(v / static_cast<double>(examples.size()));
    if (v < 1e-12) v = 1.0;
  }
  return st;
}

void apply_stats(const FeatureStats& st, std::vector<double>& features) {
  for (std::size_t j = 0; j < features.size(); ++j) {
    features[j] = (features[j] - st.mean[j]) / st.sd[j];
  }
}

void standardize_features(std::vector<LabeledExample>& examples) {
  const FeatureStats st = feature_stats(examples);
  for (auto& ex : examples) apply_stats(st, ex.features);
}

std::uint64_t split_seed(const PipelineConfig& cfg) {
  return cfg.split.seed.value_or(derive_seed(cfg.seed, "split"));
}

std::vector<const LabeledExample*> pick(
    const std::vector<LabeledExample>& examples,
    const std::vector<ArticleId>& ids) {
  std::map<ArticleId, const LabeledExample*> by_id;
  for (const auto& ex : examples) by_id[ex.article] = &ex;
  std::vector<const LabeledExample*> out;
  for (const auto& id : ids) {
    if (const auto it = by_id.find(id); it != by_id.end()) {
      out.push_back(it->second);
    }
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty set");
  const auto idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(sorted.size() - 1)));
  return sorted[std::min(idx, sorted.size() - 1)];
}

// Minimal fixed-size line chart; axes assume data in [0, 1] x [0, 1]
// unless x_max is given.
void write_svg_curve(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<std::pair<double, double>>& points,
                     double x_max = 1.0) {
  const double w = 520, h = 420, ml = 60, mr = 20, mt = 40, mb = 50;
  const double px = w - ml - mr, py = h - mt - mb;
  auto sx = [&](double x) { return ml + px * (x_max > 0 ? x / x_max : 0.0); };
  auto sy = [&](double y) { return mt + py * (1.0 - y); };

  char buf[160];
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"420\" "
         "viewBox=\"0 0 520 420\">\n";
  out += "<rect width=\"520\" height=\"420\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.0f\" y=\"24\" font-family=\"sans-serif\" "
                "font-size=\"15\" text-anchor=\"middle\">%s</text>\n",
                ml + px / 2, title.c_str());
  out += buf;
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_max * i / 4.0;
    const double fy = i / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#ddd\"/>\n",
                  sx(fx), mt, sx(fx), mt + py);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#ddd\"/>\n",
                  ml, sy(fy), ml + px, sy(fy));
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"middle\">%.2f</text>\n",
                  sx(fx), mt + py + 16, fx);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"end\">%.2f</text>\n",
                  ml - 6, sy(fy) + 4, fy);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"black\"/>\n",
                ml, mt, px, py);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"13\" text-anchor=\"middle\">%s</text>\n",
                ml + px / 2, h - 12, x_label.c_str());
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"16\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"13\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 16 %.1f)\">%s</text>\n",
                mt + py / 2, mt + py / 2, y_label.c_str());
  out += buf;

  out += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"";
  for (const auto& [x, y] : points) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f ", sx(x),
                  sy(std::clamp(y, 0.0, 1.0)));
    out += buf;
  }
  out += "\"/>\n</svg>\n";
  write_text_file(path, out);
}

double eval_loss(const MLPModel& m,
                 const std::vector<const LabeledExample*>& examples,
                 bool use_weights) {
  if (examples.empty()) return std::nan("");
  double sum = 0.0;
  for (const auto* ex : examples) {
    sum += weighted_bce(predict(m, ex->features), ex->y,
                        use_weights ? ex->w : 1.0);
  }
  return sum / static_cast<double>(examples.size());
}

}  // namespace

SimulateSummary cmd_simulate(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(path_in(cfg, "images"));

  const SimOutput sim = simulate(effective_sim(cfg));

  std::string sales;
  for (const auto& s : sim.sales) {
    sales += s.article + "," + s.category + "," + std::to_string(s.day) + "\n";
  }
  write_text_file(path_in(cfg, "sales.csv"), sales);

  std::string returns;
  for (const auto& r : sim.returns) {
    returns += r.article + "," + std::to_string(r.day) + "," +
               reason_name(r.reason) + "\n";
  }
  write_text_file(path_in(cfg, "returns.csv"), returns);

  std::string truth, regions;
  for (const auto& t : sim.truths) {
    truth += t.article + "," + fmt_g9(t.q) + "," + std::to_string(t.true_label) +
             "\n";
    const Rect& r = sim.images.at(t.article).cue_region;
    regions += t.article + "," + std::to_string(r.row) + "," +
               std::to_string(r.col) + "," + std::to_string(r.height) + "," +
               std::to_string(r.width) + "\n";
  }
  write_text_file(path_in(cfg, "truth.csv"), truth);
  write_text_file(path_in(cfg, "regions.csv"), regions);

  for (const auto& [article, img] : sim.images) {
    write_pgm((fs::path(path_in(cfg, "images")) / (article + ".pgm")).string(),
              img.image);
  }

  SimulateSummary summary{static_cast<long>(sim.truths.size()),
                          static_cast<long>(sim.sales.size()),
                          static_cast<long>(sim.returns.size())};
  std::cout << "articles: " << summary.articles << " / sales: " << summary.sales
            << " / returns: " << summary.returns << "\n";
  return summary;
}

LabelSummary cmd_label(const PipelineConfig& cfg) {
  cfg.validate();
  const auto sales = load_sales(path_in(cfg, "sales.csv"));
  const auto returns = load_returns(path_in(cfg, "returns.csv"));
  const DayWindow window = cfg.window();

  const auto ledgers = build_ledgers(sales, returns, window, cfg.min_age_days);
  const auto rates = category_rates(ledgers);
  auto labels = label_dataset(ledgers, rates);

  // Articles in the stream without a single in-window sale keep a row with
  // zero score and zero weight: inert for training, but the dataset join
  // stays total.
  std::set<ArticleId> windowed;
  for (const auto& sale : sales) {
    if (sale.day >= window.start && sale.day <= window.end) {
      windowed.insert(sale.article);
    }
  }
  std::set<ArticleId> seen;
  for (const auto& sale : sales) seen.insert(sale.article);
  for (const auto& article : seen) {
    if (!windowed.count(article)) labels.push_back({article, 0, 0.0, 0.0});
  }
  std::sort(labels.begin(), labels.end(),
            [](const WeakLabel& a, const WeakLabel& b) {
              return a.article < b.article;
            });

  write_labels_csv(path_in(cfg, "labels.csv"), labels);

  LabelSummary summary;
  for (const auto& l : labels) (l.y == 1 ? summary.size_issue : summary.no_size_issue)++;
  std::cout << "size issue: " << summary.size_issue
            << " / no size issue: " << summary.no_size_issue << "\n";
  return summary;
}

TrainSummary cmd_train(const PipelineConfig& cfg) {
  cfg.validate();
  const auto labels = read_labels_csv(path_in(cfg, "labels.csv"));
  const FeatureSet features = load_features(cfg, std::nullopt);
  auto examples = join_examples(labels, features.features);
  if (cfg.standardize) standardize_features(examples);

  std::vector<ArticleId> ids;
  for (const auto& ex : examples) ids.push_back(ex.article);
  const Split split = make_split(ids, cfg.split, split_seed(cfg));

  std::vector<LabeledExample> train_set;
  for (const auto* ex : pick(examples, split.train)) train_set.push_back(*ex);
  if (train_set.empty()) throw std::runtime_error("empty training split");
  const auto val_set = pick(examples, split.val);

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, "train");

  std::string history = "epoch,train_loss,val_loss\n";
  double last_val = std::nan("");
  TrainResult result =
      train(train_set, tc,
            [&](int epoch, const MLPModel& m, double train_loss) {
              last_val = eval_loss(m, val_set, tc.use_weights);
              history += std::to_string(epoch) + "," + fmt_g9(train_loss) +
                         "," + fmt_g9(last_val) + "\n";
            });
  result.model.projection = features.projection;

  save_model(result.model, path_in(cfg, "model.bin"));
  write_text_file(path_in(cfg, "history.csv"), history);

  TrainSummary summary;
  summary.train_size = static_cast<long>(split.train.size());
  summary.val_size = static_cast<long>(split.val.size());
  summary.test_size = static_cast<long>(split.test.size());
  summary.final_train_loss = result.history.back();
  summary.final_val_loss = last_val;
  std::cout << "train/val/test: " << summary.train_size << "/"
            << summary.val_size << "/" << summary.test_size << "\n";
  std::cout << "final train loss: " << fmt_g9(summary.final_train_loss)
            << " / final val loss: " << fmt_g9(summary.final_val_loss) << "\n";
  return summary;
}

EvaluateSummary cmd_evaluate(const PipelineConfig& cfg) {
  cfg.validate();
  const MLPModel model = load_model(path_in(cfg, "model.bin"));
  const auto labels = read_labels_csv(path_in(cfg, "labels.csv"));
  const FeatureSet features = load_features(cfg, model.projection);
  auto examples = join_examples(labels, features.features);
  if (cfg.standardize) standardize_features(examples);

  std::vector<ArticleId> ids;
  for (const auto& ex : examples) ids.push_back(ex.article);
  const Split split = make_split(ids, cfg.split, split_seed(cfg));
  const auto test_set = pick(examples, split.test);
  if (test_set.empty()) throw std::runtime_error("empty test split");

  std::vector<double> preds, weights;
  std::vector<int> y;
  for (const auto* ex : test_set) {
    preds.push_back(predict(model, ex->features));
    weights.push_back(ex->w);
    y.push_back(ex->y);
  }

  const auto [roc, auc] = roc_auc(preds, y);
  const auto [pr, ap] = pr_ap(preds, y);

  std::vector<double> sorted_w = weights;
  std::sort(sorted_w.begin(), sorted_w.end());
  std::vector<double> taus;
  for (double q : cfg.metrics.tau_quantiles) {
    taus.push_back(quantile_sorted(sorted_w, q));
  }
  const auto tau_points = accuracy_vs_tau(preds, y, weights, taus);

  const double w_split =
      cfg.metrics.w_split.value_or(quantile_sorted(sorted_w, 0.5));
  const AgreementQuadrants quads =
      agreement_quadrants(preds, weights, y, w_split);

  EvaluateSummary summary;
  summary.test_size = static_cast<long>(test_set.size());
  summary.auc = auc;
  summary.ap = ap;
  summary.confident_disagreement = quads.confident_disagreement();

  // Ground truth is simulator-only; skip the slice when absent.
  if (fs::exists(path_in(cfg, "truth.csv"))) {
    const auto truths = read_truth_csv(path_in(cfg, "truth.csv"));
    const auto sales = load_sales(path_in(cfg, "sales.csv"));
    const auto returns = load_returns(path_in(cfg, "returns.csv"));
    std::map<ArticleId, long> n_sales;
    for (const auto& ledger :
         build_ledgers(sales, returns, cfg.window(), cfg.min_age_days)) {
      n_sales[ledger.article] = ledger.n;
    }
    std::map<ArticleId, double> pred_map;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
      pred_map[test_set[i]->article] = preds[i];
    }
    summary.coldstart_accuracy = coldstart_accuracy(
        pred_map, truths, n_sales, cfg.metrics.coldstart_max_sales);
  }

  std::string pred_csv;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    pred_csv += test_set[i]->article + "," + fmt_g9(preds[i]) + "\n";
  }
  write_text_file(path_in(cfg, "predictions.csv"), pred_csv);

  std::string roc_csv = "fpr,tpr\n";
  std::vector<std::pair<double, double>> roc_pts;
  for (const auto& p : roc) {
    roc_csv += fmt_g9(p.fpr) + "," + fmt_g9(p.tpr) + "\n";
    roc_pts.emplace_back(p.fpr, p.tpr);
  }
  write_text_file(path_in(cfg, "roc.csv"), roc_csv);
  write_svg_curve(path_in(cfg, "roc.svg"), "ROC", "false positive rate",
                  "true positive rate", roc_pts);

  std::string pr_csv = "recall,precision\n";
  std::vector<std::pair<double, double>> pr_pts;
  for (const auto& p : pr) {
    pr_csv += fmt_g9(p.recall) + "," + fmt_g9(p.precision) + "\n";
    pr_pts.emplace_back(p.recall, p.precision);
  }
  write_text_file(path_in(cfg, "pr.csv"), pr_csv);
  write_svg_curve(path_in(cfg, "pr.svg"), "Precision-Recall", "recall",
                  "precision", pr_pts);

  std::string tau_csv = "tau,subset_size,accuracy,high_variance\n";
  std::vector<std::pair<double, double>> tau_pts;
  for (const auto& p : tau_points) {
    tau_csv += fmt_g9(p.tau) + "," + std::to_string(p.subset_size) + "," +
               (p.accuracy ? fmt_g9(*p.accuracy) : std::string("nan")) + "," +
               (p.high_variance ? "1" : "0") + "\n";
    if (p.accuracy) tau_pts.emplace_back(p.tau, *p.accuracy);
  }
  write_text_file(path_in(cfg, "tau.csv"), tau_csv);
  const double tau_max = taus.empty() ? 1.0 : std::max(taus.back(), 1e-9);
  write_svg_curve(path_in(cfg, "tau.svg"), "Accuracy vs weight threshold",
                  "tau", "accuracy", tau_pts, tau_max);

  std::string scatter = "article_id,w,y_hat,y\n";
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    scatter += test_set[i]->article + "," + fmt_g9(weights[i]) + "," +
               fmt_g9(preds[i]) + "," + std::to_string(y[i]) + "\n";
  }
  write_text_file(path_in(cfg, "scatter.csv"), scatter);

  char line[256];
  std::string report;
  std::snprintf(line, sizeof(line), "test articles: %ld\n", summary.test_size);
  report += line;
  std::snprintf(line, sizeof(line), "auc: %.4f\nap: %.4f\n", auc, ap);
  report += line;
  std::snprintf(line, sizeof(line), "weight split: %s\n", fmt_g9(w_split).c_str());
  report += line;
  report += "quadrants (teacher class x student call x teacher confidence):\n";
  for (int cls = 1; cls >= 0; --cls) {
    std::snprintf(line, sizeof(line),
                  "  y=%d: low-w agree %ld, high-w agree %ld, low-w disagree "
                  "%ld, high-w disagree %ld\n",
                  cls, quads.counts[cls][cls][0], quads.counts[cls][cls][1],
                  quads.counts[cls][1 - cls][0], quads.counts[cls][1 - cls][1]);
    report += line;
  }
  std::snprintf(line, sizeof(line),
                "confident disagreement: %ld of %ld (%.2f%%)\n",
                summary.confident_disagreement, summary.test_size,
                100.0 * static_cast<double>(summary.confident_disagreement) /
                    static_cast<double>(summary.test_size));
  report += line;
  if (summary.coldstart_accuracy) {
    std::snprintf(line, sizeof(line),
                  "coldstart accuracy (n <= %ld): %.4f\n",
                  cfg.metrics.coldstart_max_sales, *summary.coldstart_accuracy);
    report += line;
  } else {
    report += "coldstart accuracy: n/a\n";
  }
  write_text_file(path_in(cfg, "report.txt"), report);

  std::printf("auc: %.4f\nap: %.4f\n", auc, ap);
  return summary;
}

ExplainSummary cmd_explain(const PipelineConfig& cfg,
                           const std::vector<ArticleId>& requested) {
  cfg.validate();
  const MLPModel model = load_model(path_in(cfg, "model.bin"));
  if (!model.projection) {
    throw std::runtime_error(
        "model was trained on precomputed embeddings; explain needs images");
  }
  const RandomProjection proj(*model.projection);
  const std::string image_dir = path_in(cfg, "images");

  // A model trained on standardized features must see the same transform
  // here, so the training-universe statistics are recomputed from the same
  // label and image files the train step joined.
  std::optional<FeatureStats> stats;
  std::optional<std::vector<LabeledExample>> universe;
  if (cfg.standardize || requested.empty()) {
    const auto labels = read_labels_csv(path_in(cfg, "labels.csv"));
    const FeatureSet features = load_features(cfg, model.projection);
    universe = join_examples(labels, features.features);
    if (cfg.standardize) {
      stats = feature_stats(*universe);
      for (auto& ex : *universe) apply_stats(*stats, ex.features);
    }
  }

  std::vector<ArticleId> targets = requested;
  if (targets.empty()) {
    // Default selection: the strongest correct positives on the test split.
    auto& examples = *universe;
    std::vector<ArticleId> ids;
    for (const auto& ex : examples) ids.push_back(ex.article);
    const Split split = make_split(ids, cfg.split, split_seed(cfg));

    std::vector<std::pair<double, ArticleId>> scored;
    for (const auto* ex : pick(examples, split.test)) {
      const double y_hat = predict(model, ex->features);
      if (ex->y == 1 && y_hat >= 0.5) scored.emplace_back(y_hat, ex->article);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const std::size_t take =
        std::min<std::size_t>(scored.size(), cfg.saliency.top_tp);
    for (std::size_t i = 0; i < take; ++i) targets.push_back(scored[i].second);
    if (targets.empty()) {
      // A weak model may have no correct positives; that leaves nothing to
      // explain, which is a valid (if empty) result rather than an error.
      std::cout << "no correct positives on the test split; nothing to explain\n";
    }
  } else {
    for (const auto& id : targets) {
      if (!fs::exists((fs::path(image_dir) / (id + ".pgm")).string())) {
        std::string known;
        int shown = 0;
        for (const auto& stem : sorted_pgm_stems(image_dir)) {
          if (shown++ == 20) {
            known += ", ...";
            break;
          }
          known += (known.empty() ? "" : ", ") + stem;
        }
        throw std::runtime_error("unknown article id '" + id +
                                 "'; available: " + known);
      }
    }
  }

  std::map<ArticleId, Rect> regions;
  if (fs::exists(path_in(cfg, "regions.csv"))) {
    regions = read_regions_csv(path_in(cfg, "regions.csv"));
  }

  fs::create_directories(path_in(cfg, "saliency"));

  const ScoreFn score = [&](std::span<const double> pixels) {
    std::vector<double> feats = proj.apply(pixels);
    if (stats) apply_stats(*stats, feats);
    return predict(model, feats);
  };

  std::optional<MaskSet> masks;  // built once the image side is known
  std::string explain_csv = "article_id,y_hat,localization_score,chance\n";
  double loc_sum = 0.0;
  long loc_count = 0;

  for (const auto& id : targets) {
    const GrayImage img =
        read_pgm((fs::path(image_dir) / (id + ".pgm")).string());
    if (!masks) {
      masks = generate_masks(cfg.saliency.n_masks, cfg.saliency.grid_h,
                             cfg.saliency.grid_w, cfg.saliency.p_keep, img.side,
                             img.side, derive_seed(cfg.seed, "masks"));
    }

    double fill = 0.0;
    if (cfg.saliency.fill == "background") {
      for (double px : img.pixels) fill += px;
      fill /= static_cast<double>(img.pixels.size());
    }

    const SaliencyMap map = rise_map(score, img, *masks, fill);
    const double y_hat = score(img.pixels);

    // Scaled 8-bit render plus the scale factor needed to recover values.
    double max_v = 0.0;
    for (double v : map.values) max_v = std::max(max_v, v);
    GrayImage render;
    render.side = map.width;
    render.pixels.resize(map.values.size());
    for (std::size_t j = 0; j < map.values.size(); ++j) {
      render.pixels[j] = max_v > 0.0 ? map.values[j] / max_v : 0.0;
    }
    const std::string stem =
        (fs::path(path_in(cfg, "saliency")) / id).string();
    write_pgm(stem + ".pgm", render);
    write_text_file(stem + ".txt", "max_saliency = " + fmt_g9(max_v) + "\n");

    std::string loc = "nan", chance = "nan";
    if (const auto it = regions.find(id); it != regions.end()) {
      const double score_v =
          localization_score(map, it->second, cfg.saliency.top_q);
      const double chance_v =
          static_cast<double>(it->second.height) * it->second.width /
          static_cast<double>(map.values.size());
      loc = fmt_g9(score_v);
      chance = fmt_g9(chance_v);
      loc_sum += score_v;
      ++loc_count;
    }
    explain_csv += id + "," + fmt_g9(y_hat) + "," + loc + "," + chance + "\n";
  }
  write_text_file(path_in(cfg, "explain.csv"), explain_csv);

  ExplainSummary summary;
  summary.images = static_cast<long>(targets.size());
  if (loc_count > 0) {
    summary.mean_localization = loc_sum / static_cast<double>(loc_count);
  }
  std::cout << "explained: " << summary.images << "\n";
  if (summary.mean_localization) {
    std::cout << "mean localization: " << fmt_g9(*summary.mean_localization)
              << "\n";
  }
  return summary;
}

EvaluateSummary cmd_pipeline(const PipelineConfig& cfg) {
  cmd_simulate(cfg);
  cmd_label(cfg);
  cmd_train(cfg);
  EvaluateSummary summary = cmd_evaluate(cfg);
  cmd_explain(cfg, {});
  return summary;
}

}  // namespace sizenet
