#pragma once

#include <map>
#include <string>
#include <vector>

#include "sizenet/events.hpp"

namespace sizenet {

// Weak annotation for one article: class, confidence score, training weight.
struct WeakLabel {
  ArticleId article;
  int y = 0;       // 1 = flagged as size issue
  double s = 0.0;  // confidence score in nats, >= 0
  double w = 0.0;  // ln(1 + s)
};

// ln of the binomial likelihood C(n,k) p^k (1-p)^(n-k), evaluated in log
// space so large n cannot overflow. The 0 * ln 0 terms follow the usual
// convention: p = 0 with k = 0 and p = 1 with k = n contribute nothing, so
// a perfectly expected outcome has log-likelihood exactly 0. A rate of 0
// against observed returns (or rate 1 against non-returns) gives -inf.
// Requires 0 <= k <= n and p in [0, 1].
double log_likelihood(long n, long k, double p);

// Confidence that the article deviates from its category: s = -ln L.
// Zero exactly when the observation is certain under the rate (n = 0, or
// the degenerate rates above); never negative.
double confidence_score(long n, long k, double p);

// 1 when the observed return rate strictly exceeds the category rate.
// Ties and n = 0 stay 0: no evidence means no flag.
int assign_label(long n, long k, double p);

// Training weight w = ln(1 + s); compresses unbounded scores.
double sample_weight(double s);

// Large-n limit of the score: n * KL({k/n, 1-k/n} || {p, 1-p}) in nats.
// Defined only away from the boundary (0 < k < n, 0 < p < 1).
double kl_asymptote(long n, long k, double p);

// Extreme scores reachable at sample size n under rate p:
//   high_rate: every sale returned,   s = -n ln p
//   low_rate:  no sale returned,      s = -n ln(1-p)
struct ScoreBounds {
  double high_rate = 0.0;
  double low_rate = 0.0;
};
ScoreBounds score_bounds(long n, double p);

// One weak label per ledger, scored against its category rate; output is
// sorted by article id. A ledger whose category has no rate is an error.
std::vector<WeakLabel> label_dataset(
    const std::vector<ArticleLedger>& ledgers,
    const std::map<std::string, CategoryRate>& rates);

}  // namespace sizenet
