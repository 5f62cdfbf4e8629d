#include "sizenet/events.hpp"

#include <algorithm>
#include <stdexcept>

#include "sizenet/csv.hpp"

namespace sizenet {

namespace {

std::string at(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

[[noreturn]] void bad_row(const std::string& path, const TextLine& line,
                          const std::string& what) {
  throw std::runtime_error(at(path, line.number) + ": " + what + " in '" +
                           line.text + "'");
}

}  // namespace

const char* reason_name(ReturnReason r) {
  return r == ReturnReason::size_issue ? "size_issue" : "other";
}

std::vector<SaleEvent> load_sales(const std::string& path) {
  std::vector<SaleEvent> out;
  for (const auto& line : read_lines(path)) {
    const auto fields = split_fields(line.text);
    if (fields.size() != 3) bad_row(path, line, "expected 3 fields");
    if (fields[0].empty()) bad_row(path, line, "empty article id");
    if (fields[1].empty()) bad_row(path, line, "empty category");
    const long day = parse_long(fields[2], at(path, line.number));
    if (day < 0) bad_row(path, line, "negative day");
    out.push_back({fields[0], fields[1], static_cast<int>(day)});
  }
  return out;
}

std::vector<ReturnEvent> load_returns(const std::string& path) {
  std::vector<ReturnEvent> out;
  for (const auto& line : read_lines(path)) {
    const auto fields = split_fields(line.text);
    if (fields.size() != 3) bad_row(path, line, "expected 3 fields");
    if (fields[0].empty()) bad_row(path, line, "empty article id");
    const long day = parse_long(fields[1], at(path, line.number));
    if (day < 0) bad_row(path, line, "negative day");
    ReturnReason reason;
    if (fields[2] == "size_issue") {
      reason = ReturnReason::size_issue;
    } else if (fields[2] == "other") {
      reason = ReturnReason::other;
    } else {
      bad_row(path, line, "unknown return reason '" + fields[2] + "'");
    }
    out.push_back({fields[0], static_cast<int>(day), reason});
  }
  return out;
}

std::vector<ArticleLedger> build_ledgers(const std::vector<SaleEvent>& sales,
                                         const std::vector<ReturnEvent>& returns,
                                         DayWindow window, int min_age_days) {
  if (window.start > window.end) {
    throw std::invalid_argument("build_ledgers: window start after end");
  }
  if (min_age_days < 0) {
    throw std::invalid_argument("build_ledgers: negative min_age_days");
  }

  struct Acc {
    std::string category;
    int activation_day = 0;
    long n = 0;
    long k = 0;
  };
  std::map<ArticleId, Acc> acc;

  auto in_window = [&window](int day) {
    return day >= window.start && day <= window.end;
  };

  for (const auto& sale : sales) {
    auto [it, inserted] = acc.try_emplace(
        sale.article, Acc{sale.category, sale.day, 0, 0});
    if (!inserted) {
      if (it->second.category != sale.category) {
        throw std::runtime_error("article '" + sale.article +
                                 "' appears under categories '" +
                                 it->second.category + "' and '" +
                                 sale.category + "'");
      }
      it->second.activation_day = std::min(it->second.activation_day, sale.day);
    }
    if (in_window(sale.day)) ++it->second.n;
  }

  for (const auto& ret : returns) {
    if (!in_window(ret.day)) continue;
    auto it = acc.find(ret.article);
    if (it == acc.end() || it->second.n == 0) {
      throw std::runtime_error("return for article '" + ret.article +
                               "' with zero sales in window");
    }
    if (ret.reason == ReturnReason::size_issue) ++it->second.k;
  }

  std::vector<ArticleLedger> out;
  for (const auto& [article, a] : acc) {
    if (a.n == 0) continue;
    if (a.k > a.n) {
      throw std::runtime_error("article '" + article +
                               "' has more size returns than sales in window");
    }
    if (window.end - a.activation_day < min_age_days) continue;
    out.push_back({article, a.category, a.activation_day, a.n, a.k, window});
  }
  return out;
}

std::map<std::string, CategoryRate> category_rates(
    const std::vector<ArticleLedger>& ledgers) {
  std::map<std::string, CategoryRate> out;
  for (const auto& ledger : ledgers) {
    if (!ledgers.empty() && (ledger.window.start != ledgers.front().window.start ||
                             ledger.window.end != ledgers.front().window.end)) {
      throw std::invalid_argument("category_rates: ledgers span mixed windows");
    }
    auto [it, inserted] = out.try_emplace(
        ledger.category,
        CategoryRate{ledger.category, ledger.window, 0.0, 0, 0});
    it->second.total_n += ledger.n;
    it->second.total_k += ledger.k;
  }
  for (auto& [category, rate] : out) {
    rate.p = rate.total_n > 0
                 ? static_cast<double>(rate.total_k) / rate.total_n
                 : 0.0;
  }
  return out;
}

}  // namespace sizenet
