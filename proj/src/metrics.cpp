#include "sizenet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sizenet {

namespace {

void check_inputs(const std::vector<double>& scores,
                  const std::vector<int>& labels) {
  if (scores.empty()) throw std::invalid_argument("metric on empty input");
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores and labels differ in length");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0/1");
  }
}

// Indices sorted by score descending; equal scores stay adjacent so the
// sweep can consume them as one group.
std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

}  // namespace

std::pair<std::vector<RocPoint>, double> roc_auc(
    const std::vector<double>& scores, const std::vector<int>& labels) {
  check_inputs(scores, labels);
  const long pos = std::count(labels.begin(), labels.end(), 1);
  const long neg = static_cast<long>(labels.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("ROC needs both classes present");
  }

  const auto order = descending_order(scores);
  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0});

  double auc = 0.0;
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    long dtp = 0, dfp = 0;
    // one sweep step per distinct score; ties move diagonally
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] == 1 ? ++dtp : ++dfp;
      ++j;
    }
    const RocPoint prev = curve.back();
    tp += dtp;
    fp += dfp;
    const RocPoint next = {static_cast<double>(fp) / static_cast<double>(neg),
                           static_cast<double>(tp) / static_cast<double>(pos)};
    auc += (next.fpr - prev.fpr) * 0.5 * (prev.tpr + next.tpr);
    curve.push_back(next);
    i = j;
  }
  return {std::move(curve), auc};
}

std::pair<std::vector<PrPoint>, double> pr_ap(const std::vector<double>& scores,
                                              const std::vector<int>& labels) {
  check_inputs(scores, labels);
  const long pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0) {
    throw std::invalid_argument("average precision needs at least one positive");
  }

  const auto order = descending_order(scores);
  std::vector<PrPoint> curve;
  curve.push_back({0.0, 1.0});

  double ap = 0.0;
  double prev_recall = 0.0;
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    curve.push_back({recall, precision});
    i = j;
  }
  return {std::move(curve), ap};
}

std::vector<TauPoint> accuracy_vs_tau(const std::vector<double>& predictions,
                                      const std::vector<int>& labels,
                                      const std::vector<double>& weights,
                                      const std::vector<double>& taus) {
  check_inputs(predictions, labels);
  if (weights.size() != labels.size()) {
    throw std::invalid_argument("weights and labels differ in length");
  }
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (!(taus[i] >= taus[i - 1])) {
      throw std::invalid_argument("tau grid must be ascending");
    }
  }

  std::vector<TauPoint> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    TauPoint pt;
    pt.tau = tau;
    long correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (weights[i] < tau) continue;
      ++pt.subset_size;
      if ((predictions[i] >= 0.5 ? 1 : 0) == labels[i]) ++correct;
    }
    if (pt.subset_size > 0) {
      pt.accuracy = static_cast<double>(correct) /
                    static_cast<double>(pt.subset_size);
    }
    pt.high_variance = pt.subset_size < 30;
    out.push_back(pt);
  }
  return out;
}

long AgreementQuadrants::total() const {
  long t = 0;
  for (const auto& by_pred : counts) {
    for (const auto& by_conf : by_pred) {
      for (long c : by_conf) t += c;
    }
  }
  return t;
}

long AgreementQuadrants::confident_disagreement() const {
  return counts[1][0][1] + counts[0][1][1];
}

AgreementQuadrants agreement_quadrants(const std::vector<double>& predictions,
                                       const std::vector<double>& weights,
                                       const std::vector<int>& labels,
                                       double w_split) {
  check_inputs(predictions, labels);
  if (weights.size() != labels.size()) {
    throw std::invalid_argument("weights and labels differ in length");
  }
  AgreementQuadrants q;
  q.w_split = w_split;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = predictions[i] >= 0.5 ? 1 : 0;
    const int conf = weights[i] >= w_split ? 1 : 0;
    ++q.counts[labels[i]][pred][conf];
  }
  return q;
}

std::optional<double> coldstart_accuracy(
    const std::map<ArticleId, double>& predictions,
    const std::vector<GroundTruth>& truths,
    const std::map<ArticleId, long>& sales_per_article, long max_sales) {
  if (max_sales < 0) throw std::invalid_argument("max_sales must be >= 0");
  long total = 0, correct = 0;
  for (const auto& truth : truths) {
    const auto pred_it = predictions.find(truth.article);
    if (pred_it == predictions.end()) continue;
    const auto sales_it = sales_per_article.find(truth.article);
    const long n = sales_it == sales_per_article.end() ? 0 : sales_it->second;
    if (n > max_sales) continue;
    ++total;
    if ((pred_it->second >= 0.5 ? 1 : 0) == truth.true_label) ++correct;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace sizenet
