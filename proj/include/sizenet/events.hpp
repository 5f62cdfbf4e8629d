#pragma once

#include <map>
#include <string>
#include <vector>

namespace sizenet {

using ArticleId = std::string;

enum class ReturnReason { size_issue, other };

struct SaleEvent {
  ArticleId article;
  std::string category;
  int day = 0;  // days since epoch start, >= 0
};

struct ReturnEvent {
  ArticleId article;
  int day = 0;
  ReturnReason reason = ReturnReason::other;
};

// Inclusive day range.
struct DayWindow {
  int start = 0;
  int end = 0;
};

// Per-article aggregate over one observation window.
// Invariant: 0 <= k <= n, n >= 1.
struct ArticleLedger {
  ArticleId article;
  std::string category;
  int activation_day = 0;  // first sale day ever, windowed or not
  long n = 0;              // sales inside the window
  long k = 0;              // size-issue returns inside the window
  DayWindow window;
};

struct CategoryRate {
  std::string category;
  DayWindow window;
  double p = 0.0;  // pooled size-issue return rate, total_k / total_n
  long total_n = 0;
  long total_k = 0;
};

// CSV loaders. Row formats, no header:
//   sales:   article_id,category,day
//   returns: article_id,day,reason        (reason: size_issue | other)
// Malformed rows raise with the file, line number and offending text.
std::vector<SaleEvent> load_sales(const std::string& path);
std::vector<ReturnEvent> load_returns(const std::string& path);

// Aggregates event streams into one ledger per article with at least one
// sale inside `window`, sorted by article id. Rejects inconsistent input:
// an article listed under two categories, an in-window return for an
// article with zero in-window sales, or more in-window size returns than
// in-window sales. `min_age_days` drops articles whose first sale is less
// than that many days before the window end.
std::vector<ArticleLedger> build_ledgers(const std::vector<SaleEvent>& sales,
                                         const std::vector<ReturnEvent>& returns,
                                         DayWindow window, int min_age_days = 0);

// Pooled per-category return rates over ledgers that share one window.
std::map<std::string, CategoryRate> category_rates(
    const std::vector<ArticleLedger>& ledgers);

const char* reason_name(ReturnReason r);

}  // namespace sizenet
