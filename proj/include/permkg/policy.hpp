#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "permkg/env.hpp"
#include "permkg/errors.hpp"
#include "permkg/rng.hpp"
#include "permkg/rules.hpp"

namespace permkg {

// Two-hidden-layer ReLU network with a masked softmax head. Maps the 2N
// state vector to a distribution over at most a_max candidate actions.
struct PolicyParams {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  Eigen::Index state_dim() const { return w1.cols(); }
  Eigen::Index a_max() const { return w3.rows(); }

  bool all_finite() const {
    return w1.allFinite() && w2.allFinite() && w3.allFinite() && b1.allFinite() &&
           b2.allFinite() && b3.allFinite();
  }
};

struct TrainConfig {
  int h1 = 64;
  int h2 = 64;
  int a_max = 0;  // 0: use the permission graph's max out-degree
  double lr = 0.01;
  int episodes = 2000;
  double gamma = 0.99;
  std::uint64_t seed = 42;
  int rollouts_per_start = 20;  // one greedy + K-1 stochastic at prediction
  int max_path_length = 5;
  double entropy_beta = 0.0;  // optional entropy bonus weight during training

  EpisodeConfig episode() const { return EpisodeConfig{max_path_length, gamma}; }
};

using ActionMask = std::vector<std::uint8_t>;

struct TraceStep {
  Eigen::VectorXd x;
  int action = -1;
  double reward = 0.0;
  ActionMask mask;
};

using EpisodeTrace = std::vector<TraceStep>;

inline PolicyParams init_params(Eigen::Index state_dim, Eigen::Index a_max,
                                const TrainConfig& cfg) {
  PolicyParams p;
  p.w1.resize(cfg.h1, state_dim);
  p.b1 = Eigen::VectorXd::Zero(cfg.h1);
  p.w2.resize(cfg.h2, cfg.h1);
  p.b2 = Eigen::VectorXd::Zero(cfg.h2);
  p.w3.resize(a_max, cfg.h2);
  p.b3 = Eigen::VectorXd::Zero(a_max);

  Rng rng(derive_seed(cfg.seed, 0x1a17));
  auto fill = [&rng](Eigen::MatrixXd& m) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-bound, bound);
    }
  };
  fill(p.w1);
  fill(p.w2);
  fill(p.w3);
  return p;
}

namespace detail {

struct ForwardPass {
  Eigen::VectorXd z1, h1, z2, h2, logits, probs;
};

inline ForwardPass forward_detailed(const PolicyParams& p, const Eigen::VectorXd& x,
                                    const ActionMask& mask) {
  bool any_valid = false;
  for (auto m : mask) {
    if (m) {
      any_valid = true;
      break;
    }
  }
  if (!any_valid) throw EmptyActionMaskError();

  ForwardPass f;
  f.z1 = p.w1 * x + p.b1;
  f.h1 = f.z1.cwiseMax(0.0);
  f.z2 = p.w2 * f.h1 + p.b2;
  f.h2 = f.z2.cwiseMax(0.0);
  f.logits = p.w3 * f.h2 + p.b3;

  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < f.logits.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)] && f.logits[i] > max_logit) max_logit = f.logits[i];
  }
  f.probs = Eigen::VectorXd::Zero(f.logits.size());
  double z = 0.0;
  for (Eigen::Index i = 0; i < f.logits.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      f.probs[i] = std::exp(f.logits[i] - max_logit);
      z += f.probs[i];
    }
  }
  f.probs /= z;
  return f;
}

}  // namespace detail

// Masked action distribution for one state. Invalid slots get probability 0.
inline Eigen::VectorXd forward(const PolicyParams& p, const Eigen::VectorXd& x,
                               const ActionMask& mask) {
  return detail::forward_detailed(p, x, mask).probs;
}

// Categorical draw from dist. Deterministic given the generator state.
inline int sample_action(const Eigen::VectorXd& dist, Rng& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cum += dist[i];
    if (u < cum) return static_cast<int>(i);
  }
  return last_positive;  // u landed in the rounding tail
}

inline int argmax_action(const Eigen::VectorXd& dist) {
  int best = 0;
  double best_p = -1.0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    if (dist[i] > best_p) {
      best_p = dist[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Discounted suffix sums: G_t = sum_{k>=t} gamma^(k-t) r_k.
inline std::vector<double> returns(const std::vector<double>& rewards, double gamma) {
  std::vector<double> g(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    g[i] = acc;
  }
  return g;
}

// One REINFORCE ascent step over a batch of traces, with the batch mean
// return as baseline. Returns updated parameters; inputs are untouched.
// entropy_beta > 0 adds the policy-entropy gradient at every updated step,
// countering the collapse of probability mass among equally rewarded
// actions; the default 0 is the plain estimator.
inline PolicyParams reinforce_update(const PolicyParams& p,
                                     const std::vector<EpisodeTrace>& traces, double gamma,
                                     double lr, double entropy_beta = 0.0) {
  Eigen::MatrixXd dw1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  Eigen::MatrixXd dw2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  Eigen::MatrixXd dw3 = Eigen::MatrixXd::Zero(p.w3.rows(), p.w3.cols());
  Eigen::VectorXd db1 = Eigen::VectorXd::Zero(p.b1.size());
  Eigen::VectorXd db2 = Eigen::VectorXd::Zero(p.b2.size());
  Eigen::VectorXd db3 = Eigen::VectorXd::Zero(p.b3.size());

  std::vector<std::vector<double>> all_returns;
  double baseline = 0.0;
  std::size_t steps = 0;
  for (const auto& trace : traces) {
    std::vector<double> rewards;
    rewards.reserve(trace.size());
    for (const auto& s : trace) rewards.push_back(s.reward);
    all_returns.push_back(returns(rewards, gamma));
    for (double g : all_returns.back()) {
      baseline += g;
      ++steps;
    }
  }
  if (steps == 0) return p;
  baseline /= static_cast<double>(steps);

  for (std::size_t ti = 0; ti < traces.size(); ++ti) {
    const auto& trace = traces[ti];
    for (std::size_t si = 0; si < trace.size(); ++si) {
      const TraceStep& s = trace[si];
      const double adv = all_returns[ti][si] - baseline;
      if (adv == 0.0) continue;
      auto f = detail::forward_detailed(p, s.x, s.mask);

      // d(adv * log pi(a|s)) / dlogits = adv * (onehot(a) - probs);
      // masked slots carry probability 0 and so get zero gradient.
      Eigen::VectorXd dlogits = -f.probs;
      dlogits[s.action] += 1.0;
      dlogits *= adv;
      if (entropy_beta > 0.0) {
        // dH/dlogit_j = -p_j (log p_j + H); masked slots stay at zero.
        double entropy = 0.0;
        for (Eigen::Index j = 0; j < f.probs.size(); ++j) {
          if (f.probs[j] > 0.0) entropy -= f.probs[j] * std::log(f.probs[j]);
        }
        for (Eigen::Index j = 0; j < f.probs.size(); ++j) {
          if (f.probs[j] > 0.0) {
            dlogits[j] -= entropy_beta * f.probs[j] * (std::log(f.probs[j]) + entropy);
          }
        }
      }

      dw3 += dlogits * f.h2.transpose();
      db3 += dlogits;
      Eigen::VectorXd dh2 = p.w3.transpose() * dlogits;
      Eigen::VectorXd dz2 =
          (f.z2.array() > 0.0).select(dh2, Eigen::VectorXd::Zero(dh2.size()));
      dw2 += dz2 * f.h1.transpose();
      db2 += dz2;
      Eigen::VectorXd dh1 = p.w2.transpose() * dz2;
      Eigen::VectorXd dz1 =
          (f.z1.array() > 0.0).select(dh1, Eigen::VectorXd::Zero(dh1.size()));
      dw1 += dz1 * s.x.transpose();
      db1 += dz1;
    }
  }

  if (!(dw1.allFinite() && dw2.allFinite() && dw3.allFinite() && db1.allFinite() &&
        db2.allFinite() && db3.allFinite())) {
    throw NonFiniteGradientError();
  }

  PolicyParams out = p;
  out.w1 += lr * dw1;
  out.b1 += lr * db1;
  out.w2 += lr * dw2;
  out.b2 += lr * db2;
  out.w3 += lr * dw3;
  out.b3 += lr * db3;
  if (!out.all_finite()) throw NonFiniteGradientError();
  return out;
}

namespace detail {

inline ActionMask mask_for(const PermissionGraph& pg, const EnvState& state,
                           Eigen::Index a_max) {
  ActionMask mask(static_cast<std::size_t>(a_max), 0);
  const auto& cands = candidate_actions(pg, state);
  if (cands.size() > static_cast<std::size_t>(a_max)) {
    throw ConfigError("action width smaller than the permission graph out-degree");
  }
  for (std::size_t i = 0; i < cands.size(); ++i) mask[i] = 1;
  return mask;
}

// One rollout from (initial, start). Stochastic when rng != nullptr, greedy
// otherwise. Appends every transition to trace; returns the final state.
inline EnvState rollout(const KnowledgeGraph& kg, const PermissionGraph& pg,
                        const PolicyParams& params, const PermissionSet& initial,
                        const PermissionNode& start, const EpisodeConfig& cfg, Rng* rng,
                        EpisodeTrace* trace, std::vector<Transition>* transitions) {
  EnvState state = reset(kg, pg, initial, start);
  while (!is_terminal(pg, state, cfg)) {
    TraceStep step_rec;
    step_rec.x = encode_state(pg, state);
    step_rec.mask = mask_for(pg, state, params.a_max());
    const Eigen::VectorXd probs = forward(params, step_rec.x, step_rec.mask);
    const int action = rng ? sample_action(probs, *rng) : argmax_action(probs);
    Transition t = step(kg, pg, state, action, cfg);
    step_rec.action = action;
    step_rec.reward = t.reward;
    if (trace) trace->push_back(std::move(step_rec));
    if (transitions) transitions->push_back(t);
    state = t.next;
  }
  return state;
}

}  // namespace detail

struct TrainResult {
  PolicyParams params;
  std::vector<double> epoch_mean_returns;  // one entry per ~episodes/20 block
};

// REINFORCE over the shared policy. Each update block samples a user and a
// start permission, rolls out rollouts_per_start episodes from that same
// start, and applies one ascent step over the whole batch: sharing the
// baseline across same-start rollouts is what makes the advantage compare
// action quality instead of step position. Episode traces can be streamed
// to trace_out as JSON lines.
inline TrainResult train(const KnowledgeGraph& kg, const PermissionGraph& pg,
                         const std::vector<PermissionSet>& users, const TrainConfig& cfg,
                         std::ostream* trace_out = nullptr) {
  const Eigen::Index state_dim = 2 * static_cast<Eigen::Index>(pg.size());
  const Eigen::Index a_max = cfg.a_max > 0 ? cfg.a_max : std::max(1, pg.max_out_degree());
  TrainResult result;
  result.params = init_params(state_dim, a_max, cfg);

  std::vector<const PermissionSet*> usable;
  for (const auto& u : users) {
    if (!u.empty()) usable.push_back(&u);
  }
  if (usable.empty() || cfg.episodes <= 0) return result;

  Rng rng(derive_seed(cfg.seed, 0x7a11));
  const EpisodeConfig ep = cfg.episode();
  const int epoch_size = std::max(1, cfg.episodes / 20);
  double epoch_sum = 0.0;
  int epoch_count = 0;

  const int batch_size = std::max(1, cfg.rollouts_per_start);
  for (int episode = 0; episode < cfg.episodes;) {
    const PermissionSet& initial = *usable[rng.uniform_index(usable.size())];
    const auto held = initial.indices();
    const int start_idx = held[rng.uniform_index(held.size())];
    const PermissionNode& start = pg.nodes[static_cast<std::size_t>(start_idx)];

    std::vector<EpisodeTrace> batch;
    const int remaining = cfg.episodes - episode;
    for (int b = 0; b < std::min(batch_size, remaining); ++b, ++episode) {
      EpisodeTrace trace;
      std::vector<Transition> transitions;
      detail::rollout(kg, pg, result.params, initial, start, ep, &rng, &trace,
                      trace_out ? &transitions : nullptr);

      double total = 0.0;
      for (const auto& s : trace) total += s.reward;
      epoch_sum += total;
      ++epoch_count;

      if (trace_out) {
        for (std::size_t i = 0; i < transitions.size(); ++i) {
          const Transition& t = transitions[i];
          const auto& inst = pg.instances[static_cast<std::size_t>(
              pg.actions_from(t.state.current)[static_cast<std::size_t>(t.action)])];
          *trace_out << "{\"episode\":" << episode << ",\"step\":" << i << ",\"from\":\""
                     << format_permission(pg.nodes[static_cast<std::size_t>(t.state.current)])
                     << "\",\"rule\":" << inst.rule_id << ",\"to\":\""
                     << format_permission(inst.dst) << "\",\"reward\":" << t.reward
                     << ",\"done\":" << (t.done ? "true" : "false") << "}\n";
        }
      }

      if (!trace.empty()) batch.push_back(std::move(trace));
      if (epoch_count == epoch_size || episode + 1 == cfg.episodes) {
        result.epoch_mean_returns.push_back(epoch_sum / epoch_count);
        epoch_sum = 0.0;
        epoch_count = 0;
      }
    }
    if (!batch.empty()) {
      result.params =
          reinforce_update(result.params, batch, cfg.gamma, cfg.lr, cfg.entropy_beta);
    }
  }
  return result;
}

// Union of everything the trained policy can collect from a user's initial
// set: per start, one greedy rollout plus rollouts_per_start-1 stochastic
// ones; every rewarded transition's target is admitted. Never predicts
// outside the rule closure because unrewarded moves change nothing.
inline PermissionSet predict_permissions(const KnowledgeGraph& kg, const PermissionGraph& pg,
                                         const PolicyParams& params,
                                         const PermissionSet& initial,
                                         const TrainConfig& cfg) {
  PermissionSet predicted = initial;
  Rng rng(derive_seed(cfg.seed, 0x9ced));
  const EpisodeConfig ep = cfg.episode();
  for (int start_idx : initial.indices()) {
    const PermissionNode& start = pg.nodes[static_cast<std::size_t>(start_idx)];
    for (int k = 0; k < cfg.rollouts_per_start; ++k) {
      std::vector<Transition> transitions;
      detail::rollout(kg, pg, params, initial, start, ep, k == 0 ? nullptr : &rng, nullptr,
                      &transitions);
      for (const auto& t : transitions) {
        if (t.reward > 0.0) predicted.set(static_cast<std::size_t>(t.next.current));
      }
    }
  }
  return predicted;
}

// Checkpoint: text header, then the six arrays as little-endian doubles in
// declared order (w1, b1, w2, b2, w3, b3), matrices row-major.
inline void save_checkpoint(const std::string& path, const PolicyParams& p) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint writer assumes a little-endian host");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << "PERMKG-CKPT 1\n"
      << "h1 " << p.w1.rows() << "\n"
      << "h2 " << p.w2.rows() << "\n"
      << "a_max " << p.w3.rows() << "\n"
      << "state_dim " << p.w1.cols() << "\n"
      << "end\n";
  auto put_matrix = [&out](const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = m(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
  };
  auto put_vector = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double x = v[i];
      out.write(reinterpret_cast<const char*>(&x), sizeof(x));
    }
  };
  put_matrix(p.w1);
  put_vector(p.b1);
  put_matrix(p.w2);
  put_vector(p.b2);
  put_matrix(p.w3);
  put_vector(p.b3);
  if (!out) throw IoError("checkpoint write failed: " + path);
}

inline PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "PERMKG-CKPT" || version != "1") {
    throw IoError("not a recognized checkpoint: " + path);
  }
  long h1 = 0, h2 = 0, a_max = 0, state_dim = 0;
  std::string key;
  while (in >> key && key != "end") {
    long value = 0;
    if (!(in >> value)) throw IoError("truncated checkpoint header: " + path);
    if (key == "h1") h1 = value;
    else if (key == "h2") h2 = value;
    else if (key == "a_max") a_max = value;
    else if (key == "state_dim") state_dim = value;
    else throw IoError("unknown checkpoint header field: " + key);
  }
  if (h1 <= 0 || h2 <= 0 || a_max <= 0 || state_dim <= 0) {
    throw IoError("incomplete checkpoint header: " + path);
  }
  in.ignore(1);  // newline after "end"

  PolicyParams p;
  p.w1.resize(h1, state_dim);
  p.b1.resize(h1);
  p.w2.resize(h2, h1);
  p.b2.resize(h2);
  p.w3.resize(a_max, h2);
  p.b3.resize(a_max);
  auto get_matrix = [&in, &path](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!in) throw IoError("truncated checkpoint: " + path);
        m(i, j) = v;
      }
    }
  };
  auto get_vector = [&in, &path](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      double x = 0.0;
      in.read(reinterpret_cast<char*>(&x), sizeof(x));
      if (!in) throw IoError("truncated checkpoint: " + path);
      v[i] = x;
    }
  };
  get_matrix(p.w1);
  get_vector(p.b1);
  get_matrix(p.w2);
  get_vector(p.b2);
  get_matrix(p.w3);
  get_vector(p.b3);
  return p;
}

}  // namespace permkg
