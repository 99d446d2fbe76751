#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "permkg/entities.hpp"
#include "permkg/errors.hpp"
#include "permkg/knowledge_graph.hpp"
#include "permkg/permissions.hpp"

namespace permkg {

// Guard over the currently held permission set. All guards are positive
// conditions: once satisfied they stay satisfied as the set grows. Never is
// the degenerate case of a constraint that names no obtainable credential.
struct Guard {
  enum class Type { Always, RequireAll, Never };
  Type type = Type::Always;
  std::vector<int> required;  // permission node indices, sorted

  bool satisfied(const PermissionSet& held) const {
    switch (type) {
      case Type::Always: return true;
      case Type::Never: return false;
      case Type::RequireAll:
        for (int bit : required) {
          if (!held.test(static_cast<std::size_t>(bit))) return false;
        }
        return true;
    }
    return false;
  }
};

// One grounded application of a propagation rule: holding src may grant dst,
// gated by guard.
struct RuleInstance {
  int rule_id = 0;  // 1..10
  PermissionNode src;
  PermissionNode dst;
  Guard guard;
};

// Schema of each rule: the permission kinds its endpoints must have. Rule 10
// grants both device use and port control, hence two admissible target kinds.
inline PermissionKind rule_src_kind(int rule_id) {
  switch (rule_id) {
    case 1: case 2: return PermissionKind::SpaceAccess;
    case 3: return PermissionKind::DeviceUse;
    case 4: return PermissionKind::PortUse;
    case 5: return PermissionKind::ServiceAccess;
    case 6: case 7: case 10: return PermissionKind::ServiceControl;
    case 8: case 9: return PermissionKind::FileControl;
  }
  throw Error("bad rule id");
}

inline std::vector<PermissionKind> rule_dst_kinds(int rule_id) {
  switch (rule_id) {
    case 1: return {PermissionKind::SpaceAccess};
    case 2: return {PermissionKind::DeviceUse};
    case 3: return {PermissionKind::PortUse};
    case 4: return {PermissionKind::ServiceAccess};
    case 5: return {PermissionKind::ServiceControl};
    case 6: return {PermissionKind::FileControl};
    case 7: case 8: case 9: return {PermissionKind::InformationKnown};
    case 10: return {PermissionKind::DeviceUse, PermissionKind::PortControl};
  }
  throw Error("bad rule id");
}

// Permission universe of a graph plus every grounded rule instance, with a
// per-source action table. This is the substrate the oracle, the agent and
// the baselines all share.
struct PermissionGraph {
  std::vector<PermissionNode> nodes;
  std::map<std::pair<PermissionKind, std::string>, int> index;  // (kind, entity) -> node index
  std::vector<RuleInstance> instances;
  std::vector<std::vector<int>> actions_by_src;  // node index -> instance indices

  std::size_t size() const { return nodes.size(); }

  int node_index(PermissionKind kind, const std::string& entity) const {
    auto it = index.find({kind, entity});
    return it == index.end() ? -1 : it->second;
  }

  PermissionSet empty_set() const { return PermissionSet(nodes.size()); }

  const std::vector<int>& actions_from(int node_index_) const {
    return actions_by_src[static_cast<std::size_t>(node_index_)];
  }

  int max_out_degree() const {
    std::size_t best = 0;
    for (const auto& a : actions_by_src) best = std::max(best, a.size());
    return static_cast<int>(best);
  }

  PermissionSet set_from_literals(const std::vector<std::string>& literals) const {
    PermissionSet s(nodes.size());
    for (const auto& lit : literals) {
      auto [kind, entity] = parse_permission_literal(lit);
      int idx = node_index(kind, entity);
      if (idx < 0) throw DanglingReferenceError(lit);
      s.set(static_cast<std::size_t>(idx));
    }
    return s;
  }

  std::vector<std::string> literals_from_set(const PermissionSet& s) const {
    std::vector<std::string> out;
    for (int i : s.indices()) out.push_back(format_permission(nodes[static_cast<std::size_t>(i)]));
    return out;
  }
};

namespace detail {

// Guard for entering a space / taking control of a service: every required
// credential must already be known.
inline Guard credential_guard(const KnowledgeGraph& kg, const PermissionGraph& pg,
                              const std::string& subject) {
  if (kg.is_unconditionally_denied(subject)) return Guard{Guard::Type::Never, {}};
  Guard g;
  for (const auto& cred : kg.required_credentials(subject)) {
    int idx = pg.node_index(PermissionKind::InformationKnown, cred);
    if (idx >= 0) g.required.push_back(idx);
  }
  if (!g.required.empty()) g.type = Guard::Type::RequireAll;
  std::sort(g.required.begin(), g.required.end());
  return g;
}

}  // namespace detail

// Grounds all ten propagation rules against a graph. Output order is
// deterministic: sorted by (rule id, src index, dst index).
inline std::vector<RuleInstance> ground_rules(const KnowledgeGraph& kg,
                                              const PermissionGraph& pg) {
  std::vector<RuleInstance> out;
  auto node = [&](PermissionKind k, const std::string& id) {
    int idx = pg.node_index(k, id);
    return pg.nodes[static_cast<std::size_t>(idx)];
  };
  auto add = [&](int rule, PermissionKind sk, const std::string& src, PermissionKind dk,
                 const std::string& dst, Guard guard) {
    out.push_back(RuleInstance{rule, node(sk, src), node(dk, dst), std::move(guard)});
  };

  using K = PermissionKind;
  for (const auto& rel : kg.relations()) {
    const EntityKind sk = kg.entity(rel.src).kind;
    switch (rel.kind) {
      case RelationKind::ConnectedTo:
        // Rule 1: move between connected spaces, subject to entry constraints.
        if (sk == EntityKind::Space) {
          add(1, K::SpaceAccess, rel.src, K::SpaceAccess, rel.dst,
              detail::credential_guard(kg, pg, rel.dst));
        }
        break;
      case RelationKind::Contains:
        // Rule 2: a space grants use of every device inside it.
        if (kg.entity(rel.dst).kind == EntityKind::Device) {
          add(2, K::SpaceAccess, rel.src, K::DeviceUse, rel.dst, Guard{});
        }
        break;
      case RelationKind::HasPort:
        // Rule 3: device use grants use of all its ports.
        add(3, K::DeviceUse, rel.src, K::PortUse, rel.dst, Guard{});
        break;
      case RelationKind::ReachableFrom:
        // Rule 4: a usable port reaches the services exposed to it.
        add(4, K::PortUse, rel.dst, K::ServiceAccess, rel.src, Guard{});
        break;
      case RelationKind::StoresFile:
        // Rule 6: controlling a service grants control of its files.
        add(6, K::ServiceControl, rel.src, K::FileControl, rel.dst, Guard{});
        break;
      case RelationKind::HoldsInfo:
        if (sk == EntityKind::Service) {
          // Rule 7: a controlled service discloses what it holds.
          add(7, K::ServiceControl, rel.src, K::InformationKnown, rel.dst, Guard{});
        } else if (!kg.is_encrypted(rel.src)) {
          // Rule 8: plain files disclose their contents outright.
          add(8, K::FileControl, rel.src, K::InformationKnown, rel.dst, Guard{});
        } else {
          // Rule 9: encrypted files disclose contents once every key is
          // known. A file's credentials are exactly its keys, and a key
          // requirement naming no key is permanently unsatisfiable, so the
          // shared credential-guard logic applies unchanged.
          add(9, K::FileControl, rel.src, K::InformationKnown, rel.dst,
              detail::credential_guard(kg, pg, rel.src));
        }
        break;
      case RelationKind::ManagedBy: {
        // Rule 10: controlling the managing service yields use of the device
        // and control of all its ports.
        const std::string& dev = rel.src;
        const std::string& svc = rel.dst;
        add(10, K::ServiceControl, svc, K::DeviceUse, dev, Guard{});
        for (const auto& port : kg.adjacent(dev, RelationKind::HasPort)) {
          add(10, K::ServiceControl, svc, K::PortControl, port, Guard{});
        }
        break;
      }
      default:
        break;
    }
  }

  // Rule 5: service access escalates to control once authentication passes.
  for (const auto& [id, ent] : kg.entities()) {
    if (ent.kind == EntityKind::Service) {
      add(5, K::ServiceAccess, id, K::ServiceControl, id, detail::credential_guard(kg, pg, id));
    }
  }

  std::sort(out.begin(), out.end(), [](const RuleInstance& a, const RuleInstance& b) {
    return std::tie(a.rule_id, a.src.index, a.dst.index) <
           std::tie(b.rule_id, b.src.index, b.dst.index);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const RuleInstance& a, const RuleInstance& b) {
                          return a.rule_id == b.rule_id && a.src.index == b.src.index &&
                                 a.dst.index == b.dst.index;
                        }),
            out.end());
  return out;
}

// Node universe plus grounded rules.
inline PermissionGraph derive_permission_space(const KnowledgeGraph& kg) {
  PermissionGraph pg;
  pg.nodes = enumerate_permission_nodes(kg);
  for (const auto& n : pg.nodes) pg.index[{n.kind, n.entity}] = n.index;
  pg.instances = ground_rules(kg, pg);
  pg.actions_by_src.assign(pg.nodes.size(), {});
  for (std::size_t i = 0; i < pg.instances.size(); ++i) {
    pg.actions_by_src[static_cast<std::size_t>(pg.instances[i].src.index)].push_back(
        static_cast<int>(i));
  }
  // Per-source lists inherit the (rule id, dst index) order from the sort above.
  return pg;
}

inline bool guard_satisfied(const KnowledgeGraph& /*kg*/, const PermissionSet& held,
                            const RuleInstance& r) {
  return r.guard.satisfied(held);
}

// Least fixpoint of the rules over an initial set. Worklist strategy:
// newly granted nodes enqueue their outgoing instances; instances whose guard
// is not yet met are parked and retried after each growth round.
inline PermissionSet closure(const KnowledgeGraph& kg, const PermissionGraph& pg,
                             const PermissionSet& initial) {
  PermissionSet held = initial;
  std::deque<int> queue;
  for (int i : initial.indices()) queue.push_back(i);
  std::vector<int> parked;

  auto try_fire = [&](int inst_idx) {
    const RuleInstance& r = pg.instances[static_cast<std::size_t>(inst_idx)];
    const auto dst = static_cast<std::size_t>(r.dst.index);
    if (held.test(dst)) return true;  // nothing left to do for this instance
    if (!guard_satisfied(kg, held, r)) return false;
    held.set(dst);
    queue.push_back(r.dst.index);
    return true;
  };

  while (true) {
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      for (int inst_idx : pg.actions_from(node)) {
        if (!try_fire(inst_idx)) parked.push_back(inst_idx);
      }
    }
    // Guards are monotone, so one retry pass per growth round suffices.
    bool fired = false;
    std::vector<int> still_parked;
    for (int inst_idx : parked) {
      if (try_fire(inst_idx)) {
        fired = true;
      } else {
        still_parked.push_back(inst_idx);
      }
    }
    parked.swap(still_parked);
    if (!fired && queue.empty()) break;
  }
  return held;
}

// Reference fixpoint: full naive sweeps over every instance until nothing
// changes. Independent of the worklist path; used to cross-check labels and
// in the equivalence suite. Sweep count is bounded by the universe size.
inline PermissionSet closure_by_sweep(const KnowledgeGraph& kg, const PermissionGraph& pg,
                                      const PermissionSet& initial) {
  PermissionSet held = initial;
  const std::size_t max_sweeps = pg.size() + 1;
  std::size_t sweeps = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : pg.instances) {
      if (held.test(static_cast<std::size_t>(r.src.index)) &&
          !held.test(static_cast<std::size_t>(r.dst.index)) && guard_satisfied(kg, held, r)) {
        held.set(static_cast<std::size_t>(r.dst.index));
        changed = true;
      }
    }
    if (++sweeps > max_sweeps) throw Error("closure sweep bound exceeded");
  }
  return held;
}

}  // namespace permkg
