#include "sizenet/metrics.hpp"

#include <doctest.h>

#include <cmath>

#include "sizenet/rng.hpp"

using namespace sizenet;

namespace {

// Tie-aware pairwise concordance: wins + half-credit ties over pos x neg.
double concordance(const std::vector<double>& scores,
                   const std::vector<int>& labels) {
  double num = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) num += 1.0;
      else if (scores[i] == scores[j]) num += 0.5;
    }
  }
  return num / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("roc_auc matches the worked four-point example") {
  const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
  const std::vector<int> labels{1, 0, 1, 0};
  const auto [curve, auc] = roc_auc(scores, labels);
  CHECK(auc == doctest::Approx(0.75).epsilon(1e-12));
  REQUIRE(curve.size() == 5);
  CHECK(curve.front().fpr == 0.0);
  CHECK(curve.front().tpr == 0.0);
  CHECK(curve.back().fpr == 1.0);
  CHECK(curve.back().tpr == 1.0);
  CHECK(curve[1].tpr == doctest::Approx(0.5));
  CHECK(curve[1].fpr == 0.0);
}

TEST_CASE("roc_auc handles perfect, reversed and tied rankings") {
  const std::vector<int> labels{1, 1, 0, 0};
  CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, labels).second == doctest::Approx(1.0));
  CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, labels).second == doctest::Approx(0.0));

  const auto [curve, auc] = roc_auc({0.5, 0.5, 0.5, 0.5}, labels);
  CHECK(auc == doctest::Approx(0.5).epsilon(1e-12));
  // one tie group: straight diagonal
  REQUIRE(curve.size() == 2);
  CHECK(curve[1].fpr == 1.0);
  CHECK(curve[1].tpr == 1.0);
}

TEST_CASE("roc_auc equals brute-force concordance on random instances") {
  Rng rng(271);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(19));
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    // coarse score grid forces plenty of ties
    for (auto& s : scores) s = static_cast<double>(rng.below(6)) / 5.0;
    bool has0 = false, has1 = false;
    for (auto& y : labels) {
      y = rng.uniform01() < 0.5 ? 1 : 0;
      (y == 1 ? has1 : has0) = true;
    }
    if (!has0 || !has1) {
      labels[0] = 0;
      labels[1] = 1;
    }
    const double auc = roc_auc(scores, labels).second;
    CHECK(auc == doctest::Approx(concordance(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("roc_auc is invariant under monotone score transforms") {
  Rng rng(7);
  std::vector<double> scores(50);
  std::vector<int> labels(50);
  for (auto& s : scores) s = static_cast<double>(rng.below(10));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;

  auto warped = scores;
  for (auto& s : warped) s = std::exp(0.3 * s + 1.0);
  CHECK(roc_auc(scores, labels).second == roc_auc(warped, labels).second);
  CHECK(pr_ap(scores, labels).second == pr_ap(warped, labels).second);
}

TEST_CASE("pr_ap matches the worked four-point example") {
  const std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
  const std::vector<int> labels{1, 0, 1, 0};
  const auto [curve, ap] = pr_ap(scores, labels);
  CHECK(ap == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  REQUIRE(curve.size() == 5);
  CHECK(curve.front().recall == 0.0);
  CHECK(curve.front().precision == 1.0);
  CHECK(curve.back().recall == 1.0);
  CHECK(curve.back().precision == doctest::Approx(0.5));
}

TEST_CASE("pr_ap with one tie group reduces to the base rate") {
  const std::vector<double> scores{0.3, 0.3, 0.3, 0.3, 0.3};
  const std::vector<int> labels{1, 0, 1, 0, 0};
  const auto [curve, ap] = pr_ap(scores, labels);
  CHECK(ap == doctest::Approx(0.4).epsilon(1e-12));
  REQUIRE(curve.size() == 2);
  CHECK(curve[1].recall == 1.0);
}

TEST_CASE("ranking metrics validate their inputs") {
  CHECK_THROWS_AS(roc_auc({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({0.5}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({0.5, 0.4}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(roc_auc({0.5, 0.4}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(pr_ap({0.5, 0.4}, {0, 0}), std::invalid_argument);
}

TEST_CASE("accuracy_vs_tau filters by weight threshold") {
  const std::vector<double> preds{0.9, 0.4, 0.6, 0.2};
  const std::vector<int> labels{1, 0, 0, 0};
  const std::vector<double> weights{2.0, 1.5, 1.0, 0.5};
  const auto pts = accuracy_vs_tau(preds, labels, weights, {0.0, 1.2, 3.0});
  REQUIRE(pts.size() == 3);

  CHECK(pts[0].subset_size == 4);
  CHECK(pts[0].accuracy.value() == doctest::Approx(0.75));
  CHECK(pts[0].high_variance);

  CHECK(pts[1].subset_size == 2);
  CHECK(pts[1].accuracy.value() == doctest::Approx(1.0));

  CHECK(pts[2].subset_size == 0);
  CHECK_FALSE(pts[2].accuracy.has_value());

  CHECK_THROWS_AS(accuracy_vs_tau(preds, labels, weights, {1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(accuracy_vs_tau(preds, labels, {1.0}, {0.0}),
                  std::invalid_argument);
}

TEST_CASE("a prediction of exactly 0.5 counts as the positive class") {
  const auto pts = accuracy_vs_tau({0.5}, {1}, {1.0}, {0.0});
  CHECK(pts[0].accuracy.value() == 1.0);
}

TEST_CASE("agreement_quadrants counts each cell once") {
  const std::vector<double> preds{0.9, 0.2, 0.9, 0.2, 0.6, 0.4};
  const std::vector<double> weights{5.0, 5.0, 0.1, 0.1, 5.0, 5.0};
  const std::vector<int> labels{1, 1, 1, 1, 0, 0};
  const auto q = agreement_quadrants(preds, weights, labels, 1.0);

  CHECK(q.total() == 6);
  CHECK(q.counts[1][1][1] == 1);  // confident, student agrees with teacher 1
  CHECK(q.counts[1][0][1] == 1);  // confident, student contradicts
  CHECK(q.counts[1][1][0] == 1);
  CHECK(q.counts[1][0][0] == 1);
  CHECK(q.counts[0][1][1] == 1);
  CHECK(q.counts[0][0][1] == 1);
  CHECK(q.confident_disagreement() == 2);
}

TEST_CASE("random predictions split evenly around the weight median") {
  Rng rng(99);
  const int n = 10000;
  std::vector<double> preds(n), weights(n);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    preds[i] = rng.uniform01();
    weights[i] = rng.uniform01();
    labels[i] = i % 2;
  }
  const auto q = agreement_quadrants(preds, weights, labels, 0.5);
  long confident = 0;
  for (int y = 0; y < 2; ++y) {
    for (int s = 0; s < 2; ++s) confident += q.counts[y][s][1];
  }
  // binomial(n, 1/2): three sigmas is 150
  CHECK(std::abs(confident - n / 2) <= 150);
  CHECK(q.total() == n);
}

TEST_CASE("coldstart_accuracy restricts to low-sales articles") {
  std::vector<GroundTruth> truths = {
      {"a", 0.9, 1}, {"b", 0.1, 0}, {"c", 0.8, 1}, {"d", 0.2, 0}};
  std::map<ArticleId, double> preds = {
      {"a", 0.8}, {"b", 0.3}, {"c", 0.2}, {"d", 0.6}};
  std::map<ArticleId, long> sales = {{"a", 2}, {"b", 100}, {"c", 3}};
  // d missing from the sales map counts as zero sales

  const auto acc = coldstart_accuracy(preds, truths, sales, 5);
  REQUIRE(acc.has_value());
  // slice = {a correct, c wrong, d wrong}
  CHECK(*acc == doctest::Approx(1.0 / 3.0));

  const auto all = coldstart_accuracy(preds, truths, sales, 1000);
  CHECK(*all == doctest::Approx(0.5));

  std::map<ArticleId, long> busy = {{"a", 9}, {"b", 9}, {"c", 9}, {"d", 9}};
  CHECK_FALSE(coldstart_accuracy(preds, truths, busy, 5).has_value());

  std::map<ArticleId, double> perfect = {
      {"a", 1.0}, {"b", 0.0}, {"c", 1.0}, {"d", 0.0}};
  CHECK(coldstart_accuracy(perfect, truths, sales, 5).value() == 1.0);

  CHECK_THROWS_AS(coldstart_accuracy(preds, truths, sales, -1),
                  std::invalid_argument);
}
