#pragma once

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "permkg/errors.hpp"
#include "permkg/permissions.hpp"

namespace permkg {

struct Confusion {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// Counts over derived permissions only: the initial grant is excluded from
// the positive class on both sides, so a method earns nothing for echoing
// its input. Requires initial ⊆ truth (truth is a closure of initial).
inline Confusion confusion(const PermissionSet& pred, const PermissionSet& truth,
                           const PermissionSet& initial) {
  if (!initial.is_subset_of(truth)) throw InitialNotSubsetOfTruthError();
  Confusion c;
  const PermissionSet hit = PermissionSet::intersect(pred, truth);
  c.tp = static_cast<long long>(PermissionSet::difference(hit, initial).count());
  c.fp = static_cast<long long>(PermissionSet::difference(pred, truth).count());
  c.fn = static_cast<long long>(PermissionSet::difference(truth, pred).count());
  return c;
}

// Same counting over plain permission literals, for artifacts evaluated
// without rebuilding the graph they came from.
inline Confusion confusion(const std::set<std::string>& pred,
                           const std::set<std::string>& truth,
                           const std::set<std::string>& initial) {
  if (!std::includes(truth.begin(), truth.end(), initial.begin(), initial.end())) {
    throw InitialNotSubsetOfTruthError();
  }
  Confusion c;
  std::set<std::string> hit;
  std::set_intersection(pred.begin(), pred.end(), truth.begin(), truth.end(),
                        std::inserter(hit, hit.end()));
  std::vector<std::string> tmp;
  std::set_difference(hit.begin(), hit.end(), initial.begin(), initial.end(),
                      std::back_inserter(tmp));
  c.tp = static_cast<long long>(tmp.size());
  tmp.clear();
  std::set_difference(pred.begin(), pred.end(), truth.begin(), truth.end(),
                      std::back_inserter(tmp));
  c.fp = static_cast<long long>(tmp.size());
  tmp.clear();
  std::set_difference(truth.begin(), truth.end(), pred.begin(), pred.end(),
                      std::back_inserter(tmp));
  c.fn = static_cast<long long>(tmp.size());
  return c;
}

struct Rates {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
};

// Precision/recall/F1 with the zero convention: an empty denominator (the
// method predicted nothing / there was nothing to find) scores 0, not NaN.
inline Rates rates_from(long long tp, long long fp, long long fn) {
  Rates x;
  x.p = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  x.r = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  x.f1 = (x.p + x.r) > 0.0 ? 2.0 * x.p * x.r / (x.p + x.r) : 0.0;
  return x;
}

struct MetricsRow {
  std::string method;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  Rates micro;
  Rates macro;
};

// Micro-averaging (sum counts, then compute rates) is the headline number;
// the per-user average (macro) rides along for the CSV.
inline MetricsRow aggregate(const std::string& method, const std::vector<Confusion>& users) {
  MetricsRow row;
  row.method = method;
  Rates macro_sum;
  for (const auto& c : users) {
    row.tp += c.tp;
    row.fp += c.fp;
    row.fn += c.fn;
    const Rates r = rates_from(c.tp, c.fp, c.fn);
    macro_sum.p += r.p;
    macro_sum.r += r.r;
    macro_sum.f1 += r.f1;
  }
  row.micro = rates_from(row.tp, row.fp, row.fn);
  if (!users.empty()) {
    const double n = static_cast<double>(users.size());
    row.macro.p = macro_sum.p / n;
    row.macro.r = macro_sum.r / n;
    row.macro.f1 = macro_sum.f1 / n;
  }
  return row;
}

inline std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return std::string(buf);
}

// Fixed-width text table, rows in input order.
inline std::string render_table(const std::vector<MetricsRow>& rows) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %9s %9s %9s\n", "Method", "P", "R", "F1");
  out += line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-8s %8s%% %8s%% %8s%%\n", row.method.c_str(),
                  format_pct(row.micro.p).c_str(), format_pct(row.micro.r).c_str(),
                  format_pct(row.micro.f1).c_str());
    out += line;
  }
  return out;
}

inline std::string render_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "method,tp,fp,fn,precision,recall,f1,macro_precision,macro_recall,macro_f1\n";
  for (const auto& row : rows) {
    out += row.method;
    out += ',' + std::to_string(row.tp) + ',' + std::to_string(row.fp) + ',' +
           std::to_string(row.fn);
    out += ',' + format_pct(row.micro.p) + ',' + format_pct(row.micro.r) + ',' +
           format_pct(row.micro.f1);
    out += ',' + format_pct(row.macro.p) + ',' + format_pct(row.macro.r) + ',' +
           format_pct(row.macro.f1);
    out += '\n';
  }
  return out;
}

}  // namespace permkg
