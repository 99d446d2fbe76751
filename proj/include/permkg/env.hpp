#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "permkg/errors.hpp"
#include "permkg/knowledge_graph.hpp"
#include "permkg/permissions.hpp"
#include "permkg/rules.hpp"

namespace permkg {

struct EpisodeConfig {
  int max_path_length = 5;  // reasoning-path cap per rollout
  double gamma = 0.99;
};

// Agent state: where it sits in the permission graph and what it holds.
struct EnvState {
  int current = -1;
  PermissionSet held;
  int steps = 0;
};

struct Transition {
  EnvState state;
  int action = -1;
  double reward = 0.0;
  EnvState next;
  bool done = false;
};

// Candidate actions are the grounded instances leaving the current node,
// in (rule id, dst index) order. Guard-failing candidates stay listed: the
// agent may try them and earn nothing.
inline const std::vector<int>& candidate_actions(const PermissionGraph& pg,
                                                 const EnvState& state) {
  return pg.actions_from(state.current);
}

inline bool is_terminal(const PermissionGraph& pg, const EnvState& state,
                        const EpisodeConfig& cfg) {
  return state.steps >= cfg.max_path_length || candidate_actions(pg, state).empty();
}

inline EnvState reset(const KnowledgeGraph& /*kg*/, const PermissionGraph& /*pg*/,
                      const PermissionSet& initial, const PermissionNode& start) {
  if (!initial.test(static_cast<std::size_t>(start.index))) throw StartNotHeldError();
  return EnvState{start.index, initial, 0};
}

// Reward mirrors the oracle's guard check exactly; they are one predicate.
inline double reward_of(const KnowledgeGraph& kg, const PermissionSet& held,
                        const RuleInstance& r) {
  return guard_satisfied(kg, held, r) ? 1.0 : 0.0;
}

// Taking an action whose guard holds moves the agent and grows its set;
// a failed guard leaves it in place. Either way a step is consumed.
inline Transition step(const KnowledgeGraph& kg, const PermissionGraph& pg,
                       const EnvState& state, int action, const EpisodeConfig& cfg) {
  const auto& candidates = candidate_actions(pg, state);
  if (action < 0 || static_cast<std::size_t>(action) >= candidates.size()) {
    throw ActionOutOfRangeError();
  }
  const RuleInstance& r = pg.instances[static_cast<std::size_t>(candidates[action])];

  Transition t;
  t.state = state;
  t.action = action;
  t.reward = reward_of(kg, state.held, r);
  t.next = state;
  t.next.steps = state.steps + 1;
  if (t.reward > 0.0) {
    t.next.current = r.dst.index;
    t.next.held.set(static_cast<std::size_t>(r.dst.index));
  }
  t.done = is_terminal(pg, t.next, cfg);
  return t;
}

// Fixed-length observation: one-hot of the current node followed by the
// held-set indicator, 2N values in {0,1}. Guards read the held half, so
// position alone would not be Markov.
inline Eigen::VectorXd encode_state(const PermissionGraph& pg, const EnvState& state) {
  const auto n = static_cast<Eigen::Index>(pg.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  x[state.current] = 1.0;
  for (int i : state.held.indices()) x[n + i] = 1.0;
  return x;
}

}  // namespace permkg
