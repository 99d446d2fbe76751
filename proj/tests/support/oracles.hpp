#pragma once

// Independent re-implementations used as test oracles. Everything here is
// deliberately written from first principles against the documented
// semantics, trading speed for obviousness, so agreement with the library
// is evidence rather than tautology.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "permkg/entities.hpp"
#include "permkg/generator.hpp"
#include "permkg/knowledge_graph.hpp"
#include "permkg/permissions.hpp"
#include "permkg/policy.hpp"
#include "permkg/rng.hpp"
#include "permkg/rules.hpp"
#include "permkg/transe.hpp"

namespace oracles {

using namespace permkg;

// --- comparable flattening of rule instances -------------------------------

struct FlatInstance {
  int rule_id;
  int src;
  int dst;
  int guard_type;  // 0 always, 1 require-all, 2 never
  std::vector<int> required;

  friend auto operator<=>(const FlatInstance&, const FlatInstance&) = default;
};

inline FlatInstance flatten(const RuleInstance& inst) {
  FlatInstance f;
  f.rule_id = inst.rule_id;
  f.src = inst.src.index;
  f.dst = inst.dst.index;
  switch (inst.guard.type) {
    case Guard::Type::Always: f.guard_type = 0; break;
    case Guard::Type::RequireAll: f.guard_type = 1; break;
    case Guard::Type::Never: f.guard_type = 2; break;
  }
  f.required = inst.guard.required;
  std::sort(f.required.begin(), f.required.end());
  return f;
}

inline std::vector<FlatInstance> flatten_all(const std::vector<RuleInstance>& instances) {
  std::vector<FlatInstance> out;
  for (const auto& i : instances) out.push_back(flatten(i));
  std::sort(out.begin(), out.end());
  return out;
}

// --- brute-force rule grounding --------------------------------------------
// Iterates every ordered pair of permission nodes against each of the ten
// rule schemas, deciding membership and guard directly from graph lookups.

inline FlatInstance make_flat(int rule_id, int src, int dst, int guard_type,
                              std::vector<int> required = {}) {
  std::sort(required.begin(), required.end());
  return FlatInstance{rule_id, src, dst, guard_type, std::move(required)};
}

// Guard for acquiring `subject` (enter a space / control a service / decrypt
// a file): never if a constraint names no credential, otherwise every named
// credential must be known.
inline std::pair<int, std::vector<int>> credential_guard_of(const KnowledgeGraph& kg,
                                                            const PermissionGraph& pg,
                                                            const std::string& subject) {
  if (kg.is_unconditionally_denied(subject)) return {2, {}};
  std::vector<int> req;
  for (const auto& cred : kg.required_credentials(subject)) {
    req.push_back(pg.node_index(PermissionKind::InformationKnown, cred));
  }
  if (req.empty()) return {0, {}};
  return {1, req};
}

inline std::vector<FlatInstance> brute_force_ground(const KnowledgeGraph& kg,
                                                    const PermissionGraph& pg) {
  std::vector<FlatInstance> out;
  const int n = static_cast<int>(pg.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const PermissionNode& pa = pg.nodes[static_cast<std::size_t>(a)];
      const PermissionNode& pb = pg.nodes[static_cast<std::size_t>(b)];

      // R1: move between connected spaces, subject to the target's checks.
      if (pa.kind == PermissionKind::SpaceAccess && pb.kind == PermissionKind::SpaceAccess &&
          kg.has_relation(pa.entity, RelationKind::ConnectedTo, pb.entity)) {
        auto [g, req] = credential_guard_of(kg, pg, pb.entity);
        out.push_back(make_flat(1, a, b, g, req));
      }
      // R2: use any device in a space you can access.
      if (pa.kind == PermissionKind::SpaceAccess && pb.kind == PermissionKind::DeviceUse &&
          kg.has_relation(pa.entity, RelationKind::Contains, pb.entity)) {
        out.push_back(make_flat(2, a, b, 0));
      }
      // R3: use every port of a device you can use.
      if (pa.kind == PermissionKind::DeviceUse && pb.kind == PermissionKind::PortUse &&
          kg.has_relation(pa.entity, RelationKind::HasPort, pb.entity)) {
        out.push_back(make_flat(3, a, b, 0));
      }
      // R4: access any service reachable from a usable port.
      if (pa.kind == PermissionKind::PortUse && pb.kind == PermissionKind::ServiceAccess &&
          kg.has_relation(pb.entity, RelationKind::ReachableFrom, pa.entity)) {
        out.push_back(make_flat(4, a, b, 0));
      }
      // R5: escalate access to control on the same service, password gated.
      if (pa.kind == PermissionKind::ServiceAccess &&
          pb.kind == PermissionKind::ServiceControl && pa.entity == pb.entity) {
        auto [g, req] = credential_guard_of(kg, pg, pa.entity);
        out.push_back(make_flat(5, a, b, g, req));
      }
      // R6: control files stored on a controlled service.
      if (pa.kind == PermissionKind::ServiceControl &&
          pb.kind == PermissionKind::FileControl &&
          kg.has_relation(pa.entity, RelationKind::StoresFile, pb.entity)) {
        out.push_back(make_flat(6, a, b, 0));
      }
      // R7: learn information a controlled service holds.
      if (pa.kind == PermissionKind::ServiceControl &&
          pb.kind == PermissionKind::InformationKnown &&
          kg.has_relation(pa.entity, RelationKind::HoldsInfo, pb.entity)) {
        out.push_back(make_flat(7, a, b, 0));
      }
      if (pa.kind == PermissionKind::FileControl &&
          pb.kind == PermissionKind::InformationKnown &&
          kg.has_relation(pa.entity, RelationKind::HoldsInfo, pb.entity)) {
        if (!kg.is_encrypted(pa.entity)) {
          // R8: plain files yield their contents outright.
          out.push_back(make_flat(8, a, b, 0));
        } else {
          // R9: encrypted files yield contents once every key is known.
          auto [g, req] = credential_guard_of(kg, pg, pa.entity);
          out.push_back(make_flat(9, a, b, g, req));
        }
      }
      // R10: controlling a managing service grants the managed device and
      // control of all its ports.
      if (pa.kind == PermissionKind::ServiceControl) {
        if (pb.kind == PermissionKind::DeviceUse &&
            kg.has_relation(pb.entity, RelationKind::ManagedBy, pa.entity)) {
          out.push_back(make_flat(10, a, b, 0));
        }
        if (pb.kind == PermissionKind::PortControl) {
          for (const auto& [id, e] : kg.entities()) {
            if (e.kind == EntityKind::Device &&
                kg.has_relation(id, RelationKind::ManagedBy, pa.entity) &&
                kg.has_relation(id, RelationKind::HasPort, pb.entity)) {
              out.push_back(make_flat(10, a, b, 0));
              break;
            }
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- naive closure (third implementation, set-of-ints based) ---------------

inline std::set<int> naive_closure(const KnowledgeGraph& kg, const PermissionGraph& pg,
                                   const std::set<int>& initial) {
  std::set<int> held = initial;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& inst : pg.instances) {
      if (!held.count(inst.src.index) || held.count(inst.dst.index)) continue;
      PermissionSet held_bits = pg.empty_set();
      for (int i : held) held_bits.set(static_cast<std::size_t>(i));
      if (guard_satisfied(kg, held_bits, inst)) {
        held.insert(inst.dst.index);
        changed = true;
      }
    }
  }
  return held;
}

inline std::set<int> to_int_set(const PermissionSet& s) {
  std::set<int> out;
  for (int i : s.indices()) out.insert(i);
  return out;
}

// --- straight-line policy forward (no Eigen) --------------------------------

inline std::vector<double> naive_forward(const PolicyParams& p, const std::vector<double>& x,
                                         const std::vector<std::uint8_t>& mask) {
  const auto rows = [](const Eigen::MatrixXd& m) { return static_cast<std::size_t>(m.rows()); };
  const auto cols = [](const Eigen::MatrixXd& m) { return static_cast<std::size_t>(m.cols()); };
  std::vector<double> h1(rows(p.w1), 0.0);
  for (std::size_t i = 0; i < h1.size(); ++i) {
    double z = p.b1[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < cols(p.w1); ++j) {
      z += p.w1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
    }
    h1[i] = z > 0.0 ? z : 0.0;
  }
  std::vector<double> h2(rows(p.w2), 0.0);
  for (std::size_t i = 0; i < h2.size(); ++i) {
    double z = p.b2[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < h1.size(); ++j) {
      z += p.w2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * h1[j];
    }
    h2[i] = z > 0.0 ? z : 0.0;
  }
  std::vector<double> logits(rows(p.w3), 0.0);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double z = p.b3[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < h2.size(); ++j) {
      z += p.w3(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * h2[j];
    }
    logits[i] = z;
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i] && logits[i] > max_logit) max_logit = logits[i];
  }
  std::vector<double> probs(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) {
      probs[i] = std::exp(logits[i] - max_logit);
      z += probs[i];
    }
  }
  for (auto& v : probs) v /= z;
  return probs;
}

// --- quadratic-time discounted returns --------------------------------------

inline std::vector<double> naive_returns(const std::vector<double>& rewards, double gamma) {
  std::vector<double> g(rewards.size(), 0.0);
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    double acc = 0.0;
    double w = 1.0;
    for (std::size_t k = t; k < rewards.size(); ++k) {
      acc += w * rewards[k];
      w *= gamma;
    }
    g[t] = acc;
  }
  return g;
}

// --- naive hop-bounded embedding expansion ----------------------------------

inline std::set<int> naive_transe_expand(const DistanceTable& dt, const KindCompat& compat,
                                         const std::set<int>& initial, double tau,
                                         int max_hops) {
  std::set<int> current = initial;
  for (int hop = 0; hop < max_hops; ++hop) {
    std::set<int> next = current;
    for (int h : current) {
      for (int r = 0; r < kRuleCount; ++r) {
        if (!compat.head_ok[static_cast<std::size_t>(r)][static_cast<std::size_t>(h)]) {
          continue;
        }
        for (int t = 0; t < dt.n; ++t) {
          if (compat.tail_ok[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)] &&
              dt.at(h, r, t) <= tau) {
            next.insert(t);
          }
        }
      }
    }
    if (next == current) break;
    current.swap(next);
  }
  return current;
}

// --- randomized scenario instances -------------------------------------------

inline GenConfig random_gen_config(Rng& rng) {
  GenConfig cfg;
  cfg.seed = rng.next_u64();
  cfg.n_rooms = 1 + static_cast<int>(rng.uniform_index(4));
  cfg.n_devices = 1 + static_cast<int>(rng.uniform_index(6));
  cfg.n_services = 1 + static_cast<int>(rng.uniform_index(3));
  cfg.n_files = 1 + static_cast<int>(rng.uniform_index(4));
  cfg.n_info = 1 + static_cast<int>(rng.uniform_index(4));
  cfg.p_password = rng.uniform01();
  cfg.p_encrypt = rng.uniform01();
  cfg.p_guard = rng.uniform01() * 0.6;
  cfg.n_users = 4;
  cfg.train_frac = 0.5;
  return cfg;
}

inline PermissionSet random_subset(const PermissionGraph& pg, Rng& rng, double density) {
  PermissionSet s = pg.empty_set();
  for (std::size_t i = 0; i < pg.size(); ++i) {
    if (rng.uniform01() < density) s.set(i);
  }
  return s;
}

}  // namespace oracles
