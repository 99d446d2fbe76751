#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "permkg/errors.hpp"
#include "permkg/metrics.hpp"
#include "permkg/permissions.hpp"
#include "permkg/rng.hpp"
#include "permkg/rules.hpp"

namespace permkg {

inline constexpr int kRuleCount = 10;

// A grounded rule instance flattened to (head entity, relation, tail
// entity) over permission-node indices; rel is the 0-based rule index.
struct Triple {
  int head = 0;
  int rel = 0;
  int tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline std::vector<Triple> triples_from(const PermissionGraph& pg) {
  std::vector<Triple> out;
  out.reserve(pg.instances.size());
  for (const auto& inst : pg.instances) {
    out.push_back(Triple{inst.src.index, inst.rule_id - 1, inst.dst.index});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct TranseConfig {
  int dim = 50;
  double margin = 1.0;
  double lr = 0.01;
  int epochs = 500;
  std::uint64_t seed = 42;
  int max_hops = 5;  // prediction-time expansion cap, matching the episode horizon
};

struct EmbeddingModel {
  Eigen::MatrixXd entity;    // one row per permission node
  Eigen::MatrixXd relation;  // one row per rule
};

namespace detail {

inline double triple_distance(const EmbeddingModel& m, const Triple& t) {
  return (m.entity.row(t.head) + m.relation.row(t.rel) - m.entity.row(t.tail)).norm();
}

struct HingeGrad {
  double loss = 0.0;
  std::map<int, Eigen::RowVectorXd> d_entity;
  std::map<int, Eigen::RowVectorXd> d_relation;
};

// Margin ranking term max(0, margin + ||h+r-t|| - ||h'+r'-t'||) and its
// gradient, returned as the handful of affected rows. Shared rows (e.g. a
// corrupted triple reusing the true head) accumulate correctly.
inline HingeGrad hinge_grad(const EmbeddingModel& m, const Triple& pos, const Triple& neg,
                            double margin) {
  HingeGrad g;
  const Eigen::RowVectorXd diff_pos =
      m.entity.row(pos.head) + m.relation.row(pos.rel) - m.entity.row(pos.tail);
  const Eigen::RowVectorXd diff_neg =
      m.entity.row(neg.head) + m.relation.row(neg.rel) - m.entity.row(neg.tail);
  const double d_pos = diff_pos.norm();
  const double d_neg = diff_neg.norm();
  g.loss = margin + d_pos - d_neg;
  if (g.loss <= 0.0) {
    g.loss = 0.0;
    return g;
  }
  const Eigen::Index d = m.entity.cols();
  auto add = [d](std::map<int, Eigen::RowVectorXd>& sink, int row,
                 const Eigen::RowVectorXd& v) {
    auto [it, inserted] = sink.try_emplace(row, Eigen::RowVectorXd::Zero(d));
    it->second += v;
  };
  if (d_pos > 1e-12) {
    const Eigen::RowVectorXd u = diff_pos / d_pos;
    add(g.d_entity, pos.head, u);
    add(g.d_entity, pos.tail, -u);
    add(g.d_relation, pos.rel, u);
  }
  if (d_neg > 1e-12) {
    const Eigen::RowVectorXd u = diff_neg / d_neg;
    add(g.d_entity, neg.head, -u);
    add(g.d_entity, neg.tail, u);
    add(g.d_relation, neg.rel, -u);
  }
  return g;
}

}  // namespace detail

struct TranseResult {
  EmbeddingModel model;
  std::vector<double> epoch_losses;  // mean hinge loss per epoch
};

// Translation-embedding fit: SGD over shuffled triples with one uniformly
// corrupted negative each (head or tail replaced), entity rows projected
// back into the unit ball after every epoch. Deterministic given cfg.seed.
inline TranseResult train_transe(const std::vector<Triple>& triples, int n_entities,
                                 const TranseConfig& cfg) {
  if (triples.empty()) throw EmptyTriplesError();

  TranseResult result;
  EmbeddingModel& m = result.model;
  Rng rng(derive_seed(cfg.seed, 0x7e5e));
  const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.dim));
  auto init_rows = [&rng, bound](Eigen::MatrixXd& mat, Eigen::Index rows, Eigen::Index cols) {
    mat.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) mat(i, j) = rng.uniform(-bound, bound);
      const double n = mat.row(i).norm();
      if (n > 0.0) mat.row(i) /= n;
    }
  };
  init_rows(m.entity, n_entities, cfg.dim);
  init_rows(m.relation, kRuleCount, cfg.dim);

  std::vector<std::size_t> order(triples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own generator keeps the order portable.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Triple& pos = triples[idx];
      Triple neg = pos;
      const int replacement = static_cast<int>(rng.uniform_index(
          static_cast<std::size_t>(n_entities)));
      if (rng.uniform01() < 0.5) {
        neg.head = replacement;
      } else {
        neg.tail = replacement;
      }
      const auto g = detail::hinge_grad(m, pos, neg, cfg.margin);
      loss_sum += g.loss;
      for (const auto& [row, grad] : g.d_entity) m.entity.row(row) -= cfg.lr * grad;
      for (const auto& [row, grad] : g.d_relation) m.relation.row(row) -= cfg.lr * grad;
    }
    for (Eigen::Index i = 0; i < m.entity.rows(); ++i) {
      const double n = m.entity.row(i).norm();
      if (n > 1.0) m.entity.row(i) /= n;
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(triples.size()));
  }
  return result;
}

// All pairwise translated distances D[h][r][t] = ||e_h + w_r - e_t||,
// computed once and shared across per-user predictions.
struct DistanceTable {
  int n = 0;
  std::vector<double> d;  // layout: (h * kRuleCount + r) * n + t

  double at(int h, int r, int t) const {
    return d[(static_cast<std::size_t>(h) * kRuleCount + static_cast<std::size_t>(r)) *
                 static_cast<std::size_t>(n) +
             static_cast<std::size_t>(t)];
  }
};

inline DistanceTable build_distance_table(const EmbeddingModel& m) {
  DistanceTable dt;
  dt.n = static_cast<int>(m.entity.rows());
  dt.d.resize(static_cast<std::size_t>(dt.n) * kRuleCount * static_cast<std::size_t>(dt.n));
  for (int h = 0; h < dt.n; ++h) {
    for (int r = 0; r < kRuleCount; ++r) {
      const Eigen::RowVectorXd translated = m.entity.row(h) + m.relation.row(r);
      const std::size_t base =
          (static_cast<std::size_t>(h) * kRuleCount + static_cast<std::size_t>(r)) *
          static_cast<std::size_t>(dt.n);
      for (int t = 0; t < dt.n; ++t) {
        dt.d[base + static_cast<std::size_t>(t)] = (translated - m.entity.row(t)).norm();
      }
    }
  }
  return dt;
}

// Per-relation masks of which permission kinds may appear as head/tail,
// mirroring the rule schemas the triples were grounded from.
struct KindCompat {
  std::vector<std::vector<char>> head_ok;  // [rel][node]
  std::vector<std::vector<char>> tail_ok;
};

inline KindCompat build_kind_compat(const PermissionGraph& pg) {
  KindCompat c;
  const std::size_t n = pg.size();
  c.head_ok.assign(kRuleCount, std::vector<char>(n, 0));
  c.tail_ok.assign(kRuleCount, std::vector<char>(n, 0));
  for (int r = 0; r < kRuleCount; ++r) {
    const PermissionKind src_kind = rule_src_kind(r + 1);
    const auto dst_kinds = rule_dst_kinds(r + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (pg.nodes[i].kind == src_kind) c.head_ok[r][i] = 1;
      for (PermissionKind k : dst_kinds) {
        if (pg.nodes[i].kind == k) c.tail_ok[r][i] = 1;
      }
    }
  }
  return c;
}

// Minimal threshold at which each node joins the expansion: b(t) is the
// smallest tau_e such that iterative type-compatible expansion from the
// initial set reaches t within max_hops hops. One profile answers every
// threshold query for a user, which makes the tuning sweep cheap.
inline std::vector<double> bottleneck_profile(const DistanceTable& dt, const KindCompat& compat,
                                              const PermissionSet& initial, int max_hops) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> b(static_cast<std::size_t>(dt.n), inf);
  for (int i : initial.indices()) b[static_cast<std::size_t>(i)] = 0.0;

  for (int hop = 0; hop < max_hops; ++hop) {
    const std::vector<double> prev = b;
    bool changed = false;
    for (int h = 0; h < dt.n; ++h) {
      if (prev[static_cast<std::size_t>(h)] == inf) continue;
      const double bh = prev[static_cast<std::size_t>(h)];
      for (int r = 0; r < kRuleCount; ++r) {
        if (!compat.head_ok[static_cast<std::size_t>(r)][static_cast<std::size_t>(h)]) continue;
        const auto& tail_ok = compat.tail_ok[static_cast<std::size_t>(r)];
        for (int t = 0; t < dt.n; ++t) {
          if (!tail_ok[static_cast<std::size_t>(t)]) continue;
          const double via = std::max(bh, dt.at(h, r, t));
          if (via < b[static_cast<std::size_t>(t)]) {
            b[static_cast<std::size_t>(t)] = via;
            changed = true;
          }
        }
      }
    }
    if (!changed) break;
  }
  return b;
}

inline PermissionSet transe_predict(const DistanceTable& dt, const KindCompat& compat,
                                    const PermissionSet& initial, double tau_e, int max_hops) {
  PermissionSet out = initial;
  const auto profile = bottleneck_profile(dt, compat, initial, max_hops);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] <= tau_e) out.set(i);
  }
  return out;
}

// Validation sweep over observed profile values; micro-F1 argmax, ties to
// the smaller (more conservative) threshold.
inline double tune_transe_threshold(
    const DistanceTable& dt, const KindCompat& compat,
    const std::vector<std::pair<PermissionSet, PermissionSet>>& train,  // (initial, truth)
    int max_hops) {
  std::vector<std::vector<double>> profiles;
  profiles.reserve(train.size());
  std::vector<double> pool;
  for (const auto& [initial, truth] : train) {
    (void)truth;
    profiles.push_back(bottleneck_profile(dt, compat, initial, max_hops));
    const auto& b = profiles.back();
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (std::isfinite(b[i]) && !initial.test(i)) pool.push_back(b[i]);
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
  candidates.push_back(-1.0);  // below every distance: predicts nothing

  double best_tau = -1.0;
  double best_f1 = -1.0;
  for (double tau : candidates) {
    Confusion total;
    for (std::size_t u = 0; u < train.size(); ++u) {
      const auto& [initial, truth] = train[u];
      PermissionSet pred = initial;
      for (std::size_t i = 0; i < profiles[u].size(); ++i) {
        if (profiles[u][i] <= tau) pred.set(i);
      }
      total += confusion(pred, truth, initial);
    }
    const double f1 = rates_from(total.tp, total.fp, total.fn).f1;
    if (f1 > best_f1 || (f1 == best_f1 && tau < best_tau)) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace permkg
