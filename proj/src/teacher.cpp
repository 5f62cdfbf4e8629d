#include "sizenet/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sizenet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_binom(long n, long k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

void check_counts(long n, long k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("need 0 <= k <= n, got n=" + std::to_string(n) +
                                " k=" + std::to_string(k));
  }
}

void check_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("rate must be in [0, 1], got " +
                                std::to_string(p));
  }
}

}  // namespace

double log_likelihood(long n, long k, double p) {
  check_counts(n, k);
  check_rate(p);
  double ll = log_binom(n, k);
  if (k > 0) ll += p > 0.0 ? k * std::log(p) : -kInf;
  if (n - k > 0) ll += p < 1.0 ? (n - k) * std::log1p(-p) : -kInf;
  return ll;
}

double confidence_score(long n, long k, double p) {
  const double s = -log_likelihood(n, k, p);
  // lgamma rounding can leave a sub-ulp negative residue; the score is
  // never below zero.
  return s > 0.0 ? s : 0.0;
}

int assign_label(long n, long k, double p) {
  check_counts(n, k);
  check_rate(p);
  if (n == 0) return 0;
  return static_cast<double>(k) / static_cast<double>(n) > p ? 1 : 0;
}

double sample_weight(double s) {
  if (!(s >= 0.0)) {
    throw std::invalid_argument("sample_weight: score must be >= 0");
  }
  return std::log1p(s);
}

double kl_asymptote(long n, long k, double p) {
  check_counts(n, k);
  if (k == 0 || k == n || !(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(
        "kl_asymptote: needs 0 < k < n and rate strictly inside (0, 1)");
  }
  const double r = static_cast<double>(k) / static_cast<double>(n);
  return static_cast<double>(n) *
         (r * std::log(r / p) + (1.0 - r) * std::log((1.0 - r) / (1.0 - p)));
}

ScoreBounds score_bounds(long n, double p) {
  if (n < 1) throw std::invalid_argument("score_bounds: n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("score_bounds: rate strictly inside (0, 1)");
  }
  return {-static_cast<double>(n) * std::log(p),
          -static_cast<double>(n) * std::log1p(-p)};
}

std::vector<WeakLabel> label_dataset(
    const std::vector<ArticleLedger>& ledgers,
    const std::map<std::string, CategoryRate>& rates) {
  std::vector<WeakLabel> out;
  out.reserve(ledgers.size());
  for (const auto& ledger : ledgers) {
    const auto it = rates.find(ledger.category);
    if (it == rates.end()) {
      throw std::runtime_error("no category rate for '" + ledger.category + "'");
    }
    const double p = it->second.p;
    WeakLabel label;
    label.article = ledger.article;
    label.y = assign_label(ledger.n, ledger.k, p);
    label.s = confidence_score(ledger.n, ledger.k, p);
    label.w = sample_weight(label.s);
    out.push_back(std::move(label));
  }
  std::sort(out.begin(), out.end(),
            [](const WeakLabel& a, const WeakLabel& b) {
              return a.article < b.article;
            });
  return out;
}

}  // namespace sizenet
