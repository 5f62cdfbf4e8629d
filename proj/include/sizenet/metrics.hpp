#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sizenet/events.hpp"
#include "sizenet/simulator.hpp"

namespace sizenet {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 1.0;
};

// ROC sweep over descending distinct scores, ties grouped into single
// segments; AUC by trapezoid, which equals tie-corrected pairwise
// concordance. Needs both classes present.
std::pair<std::vector<RocPoint>, double> roc_auc(
    const std::vector<double>& scores, const std::vector<int>& labels);

// Precision-recall sweep with step-wise average precision
// AP = sum (R_i - R_{i-1}) P_i. Needs at least one positive.
std::pair<std::vector<PrPoint>, double> pr_ap(
    const std::vector<double>& scores, const std::vector<int>& labels);

struct TauPoint {
  double tau = 0.0;
  long subset_size = 0;
  std::optional<double> accuracy;  // empty subset has no accuracy
  bool high_variance = false;      // subset smaller than 30
};

// Accuracy of thresholded predictions restricted to examples with w >= tau,
// for an ascending grid of taus.
std::vector<TauPoint> accuracy_vs_tau(const std::vector<double>& predictions,
                                      const std::vector<int>& labels,
                                      const std::vector<double>& weights,
                                      const std::vector<double>& taus);

// 2x2 agreement per class: student side (y_hat >= 0.5) x teacher
// confidence side (w >= w_split).
struct AgreementQuadrants {
  double w_split = 0.0;
  // counts[y][student_pred][confident]
  long counts[2][2][2] = {{{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}};

  long total() const;
  // Teacher confident but the student contradicts the teacher's class.
  long confident_disagreement() const;
};

AgreementQuadrants agreement_quadrants(const std::vector<double>& predictions,
                                       const std::vector<double>& weights,
                                       const std::vector<int>& labels,
                                       double w_split);

// Accuracy of thresholded predictions against ground truth, restricted to
// articles with at most max_sales recorded sales (articles missing from
// `sales_per_article` count as zero sales). Empty slice means no value.
std::optional<double> coldstart_accuracy(
    const std::map<ArticleId, double>& predictions,
    const std::vector<GroundTruth>& truths,
    const std::map<ArticleId, long>& sales_per_article, long max_sales);

}  // namespace sizenet
