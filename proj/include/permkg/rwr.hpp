#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "permkg/errors.hpp"
#include "permkg/metrics.hpp"
#include "permkg/permissions.hpp"
#include "permkg/rules.hpp"

namespace permkg {

// Guard-free view of the permission graph for the random-walk baseline:
// just the directed node-to-node edges induced by rule instances, deduped.
// Dangling nodes self-loop so every column of the implied transition
// matrix sums to 1.
struct WalkGraph {
  int n = 0;
  std::vector<std::vector<int>> out;  // sorted, unique successor lists
};

inline WalkGraph build_walk_graph(const PermissionGraph& pg) {
  WalkGraph g;
  g.n = static_cast<int>(pg.size());
  g.out.assign(static_cast<std::size_t>(g.n), {});
  for (const auto& inst : pg.instances) {
    g.out[static_cast<std::size_t>(inst.src.index)].push_back(inst.dst.index);
  }
  for (auto& succ : g.out) {
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
  }
  return g;
}

struct RwrConfig {
  double restart = 0.15;
  double tol = 1e-10;
  long max_iter = 10000;
};

// Power iteration for the restart walk v <- (1-R)·P·v + R·e, where e is
// uniform over the seed set and P is the column-stochastic walk matrix.
// Stops when the L1 step falls below tol; the result always sums to 1.
inline std::vector<double> rwr_scores(const WalkGraph& g, const PermissionSet& seeds,
                                      double restart, double tol, long max_iter) {
  if (seeds.empty()) throw EmptySeedsError();
  if (!(restart > 0.0 && restart < 1.0)) {
    throw ConfigError("restart probability must lie strictly between 0 and 1");
  }
  const auto seed_idx = seeds.indices();
  std::vector<double> e(static_cast<std::size_t>(g.n), 0.0);
  const double share = 1.0 / static_cast<double>(seed_idx.size());
  for (int i : seed_idx) e[static_cast<std::size_t>(i)] = share;

  std::vector<double> v = e;
  std::vector<double> next(static_cast<std::size_t>(g.n), 0.0);
  for (long iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = restart * e[i];
    const double keep = 1.0 - restart;
    for (std::size_t src = 0; src < v.size(); ++src) {
      if (v[src] == 0.0) continue;
      const auto& succ = g.out[src];
      if (succ.empty()) {
        next[src] += keep * v[src];  // dangling: self-loop
      } else {
        const double mass = keep * v[src] / static_cast<double>(succ.size());
        for (int dst : succ) next[static_cast<std::size_t>(dst)] += mass;
      }
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) diff += std::abs(next[i] - v[i]);
    v.swap(next);
    if (diff < tol) return v;
  }
  throw NonConvergenceError(max_iter);
}

inline PermissionSet rwr_predict(const std::vector<double>& scores, const PermissionSet& seeds,
                                 double tau) {
  PermissionSet out = seeds;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= tau) out.set(i);
  }
  return out;
}

// Threshold sweep on the training split: candidate cut-points are the
// distinct non-seed scores observed there (subsampled by rank when large)
// plus a predict-nothing sentinel; the micro-F1 argmax wins, ties going to
// the more conservative (larger) threshold.
inline double tune_rwr_threshold(
    const WalkGraph& g,
    const std::vector<std::pair<PermissionSet, PermissionSet>>& train,  // (initial, truth)
    const RwrConfig& cfg = {}) {
  std::vector<std::vector<double>> all_scores;
  all_scores.reserve(train.size());
  std::vector<double> pool;
  for (const auto& [initial, truth] : train) {
    (void)truth;
    if (initial.empty()) {
      all_scores.emplace_back();
      continue;
    }
    all_scores.push_back(rwr_scores(g, initial, cfg.restart, cfg.tol, cfg.max_iter));
    const auto& scores = all_scores.back();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] > 0.0 && !initial.test(i)) pool.push_back(scores[i]);
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::vector<double> candidates;
  const std::size_t max_candidates = 256;
  if (pool.size() <= max_candidates) {
    candidates = pool;
  } else {
    for (std::size_t k = 0; k < max_candidates; ++k) {
      candidates.push_back(pool[k * (pool.size() - 1) / (max_candidates - 1)]);
    }
  }
  candidates.push_back(2.0);  // scores are probabilities: predicts nothing

  double best_tau = 2.0;
  double best_f1 = -1.0;
  for (double tau : candidates) {
    Confusion total;
    for (std::size_t u = 0; u < train.size(); ++u) {
      const auto& [initial, truth] = train[u];
      PermissionSet pred = initial;
      if (!all_scores[u].empty()) pred = rwr_predict(all_scores[u], initial, tau);
      total += confusion(pred, truth, initial);
    }
    const double f1 = rates_from(total.tp, total.fp, total.fn).f1;
    if (f1 > best_f1 || (f1 == best_f1 && tau > best_tau)) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace permkg
