#pragma once

#include <chrono>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "permkg/generator.hpp"
#include "permkg/io.hpp"
#include "permkg/metrics.hpp"
#include "permkg/policy.hpp"
#include "permkg/rules.hpp"
#include "permkg/rwr.hpp"
#include "permkg/transe.hpp"

namespace permkg {

inline TrainConfig parse_train_config(const nlohmann::json& j) {
  TrainConfig cfg;
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  auto get_int = [&j](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
      throw ConfigError(std::string(key) + " must be an integer");
    }
    return j.at(key).get<int>();
  };
  auto get_num = [&j](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j.at(key).get<double>();
  };
  cfg.h1 = get_int("h1", cfg.h1);
  cfg.h2 = get_int("h2", cfg.h2);
  cfg.a_max = get_int("a_max", cfg.a_max);
  cfg.lr = get_num("lr", cfg.lr);
  cfg.episodes = get_int("episodes", cfg.episodes);
  cfg.gamma = get_num("gamma", cfg.gamma);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.rollouts_per_start = get_int("rollouts_per_start", cfg.rollouts_per_start);
  cfg.max_path_length = get_int("max_path_length", cfg.max_path_length);
  cfg.entropy_beta = get_num("entropy_beta", cfg.entropy_beta);
  if (cfg.h1 < 1 || cfg.h2 < 1 || cfg.episodes < 0 || cfg.rollouts_per_start < 1 ||
      cfg.max_path_length < 1 || !(cfg.lr > 0.0) || !(cfg.gamma > 0.0 && cfg.gamma <= 1.0) ||
      cfg.entropy_beta < 0.0) {
    throw ConfigError("training config values out of range");
  }
  return cfg;
}

inline RwrConfig parse_rwr_config(const nlohmann::json& j) {
  RwrConfig cfg;
  if (j.contains("restart")) cfg.restart = j.at("restart").get<double>();
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<long>();
  if (!(cfg.restart > 0.0 && cfg.restart < 1.0) || !(cfg.tol > 0.0) || cfg.max_iter < 1) {
    throw ConfigError("restart-walk config values out of range");
  }
  return cfg;
}

inline TranseConfig parse_transe_config(const nlohmann::json& j) {
  TranseConfig cfg;
  if (j.contains("dim")) cfg.dim = j.at("dim").get<int>();
  if (j.contains("margin")) cfg.margin = j.at("margin").get<double>();
  if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
  if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("max_hops")) cfg.max_hops = j.at("max_hops").get<int>();
  if (cfg.dim < 1 || cfg.epochs < 0 || cfg.max_hops < 1 || !(cfg.lr > 0.0) ||
      !(cfg.margin > 0.0)) {
    throw ConfigError("embedding config values out of range");
  }
  return cfg;
}

struct PipelineConfig {
  GenConfig gen;
  TrainConfig train;
  RwrConfig rwr;
  TranseConfig transe;
  int jobs = 0;  // 0: hardware concurrency
  bool ablation = true;
  nlohmann::json raw = nlohmann::json::object();
};

inline PipelineConfig parse_pipeline_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  PipelineConfig cfg;
  cfg.raw = j;
  cfg.gen = parse_gen_config(j.contains("gen") ? j.at("gen") : nlohmann::json::object());
  cfg.train =
      parse_train_config(j.contains("train") ? j.at("train") : nlohmann::json::object());
  cfg.rwr = parse_rwr_config(j.contains("rwr") ? j.at("rwr") : nlohmann::json::object());
  cfg.transe =
      parse_transe_config(j.contains("transe") ? j.at("transe") : nlohmann::json::object());
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("ablation")) cfg.ablation = j.at("ablation").get<bool>();
  if (cfg.jobs < 0) throw ConfigError("jobs must be >= 0");
  // The dataset seed drives every stage unless a stage pins its own.
  if (!j.contains("train") || !j.at("train").contains("seed")) {
    cfg.train.seed = derive_seed(cfg.gen.seed, 0x7124);
  }
  if (!j.contains("transe") || !j.at("transe").contains("seed")) {
    cfg.transe.seed = derive_seed(cfg.gen.seed, 0x7e2a);
  }
  return cfg;
}

namespace detail {

// Index-stable parallel map: results land in caller-owned slots, so thread
// scheduling cannot change any output byte.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, n == 0 ? 1 : static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, n, w, workers] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

struct PipelineResult {
  std::vector<MetricsRow> rows;  // PRA, TransE, KGRGRL, BOR (+ Ablation)
  std::string metrics_csv_path;
  std::string metrics_txt_path;
};

// End-to-end benchmark: generate a scenario and user population, label it
// with the rule closure, fit the policy and both baselines on the train
// split, predict the test split with all methods, and score everything
// against the oracle labels.
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                                   std::ostream* log = nullptr) {
  namespace fs_clock = std::chrono;
  const auto t0 = fs_clock::steady_clock::now();
  auto say = [&](const std::string& msg) {
    if (log) {
      const auto dt = fs_clock::duration_cast<fs_clock::milliseconds>(
                          fs_clock::steady_clock::now() - t0)
                          .count();
      *log << "[" << dt << " ms] " << msg << "\n";
    }
  };
  auto path_in = [&out_dir](const std::string& name) { return out_dir + "/" + name; };

  // --- generate + label ---
  const ScenarioSpec spec = generate_topology(cfg.gen);
  write_text_file(path_in("scenario.json"), serialize_scenario(spec));
  const KnowledgeGraph kg = build_kg(spec);
  const PermissionGraph pg = derive_permission_space(kg);
  save_kg(path_in("kg.json"), kg, pg);
  say("scenario: " + std::to_string(kg.entities().size()) + " entities, " +
      std::to_string(pg.size()) + " permission nodes, " +
      std::to_string(pg.instances.size()) + " rule instances");

  const LabeledDataset ds = generate_users(kg, pg, cfg.gen);
  save_users(path_in("users.jsonl"), pg, ds.users);
  save_split(path_in("split.json"), ds.train_ids, ds.test_ids);
  say("users: " + std::to_string(ds.users.size()) + " labeled, " +
      std::to_string(ds.train_ids.size()) + " train / " + std::to_string(ds.test_ids.size()) +
      " test");

  std::map<std::string, const UserRecord*> by_id;
  for (const auto& u : ds.users) by_id[u.id] = &u;
  std::vector<const UserRecord*> train_users, test_users;
  for (const auto& id : ds.train_ids) train_users.push_back(by_id.at(id));
  for (const auto& id : ds.test_ids) test_users.push_back(by_id.at(id));

  std::vector<UserRecord> test_records;
  for (const UserRecord* u : test_users) test_records.push_back(*u);
  save_truth(path_in("truth.jsonl"), pg, test_records);

  std::vector<std::pair<PermissionSet, PermissionSet>> train_pairs;
  for (const UserRecord* u : train_users) train_pairs.emplace_back(u->initial, u->final);

  auto predict_all = [&](const std::function<PermissionSet(std::size_t)>& predict_one) {
    std::vector<std::pair<std::string, PermissionSet>> preds(
        test_users.size(), {std::string(), pg.empty_set()});
    detail::parallel_for(test_users.size(), cfg.jobs, [&](std::size_t i) {
      preds[i] = {test_users[i]->id, predict_one(i)};
    });
    return preds;
  };
  auto score = [&](const std::string& method,
                   const std::vector<std::pair<std::string, PermissionSet>>& preds) {
    std::vector<Confusion> per_user;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      per_user.push_back(
          confusion(preds[i].second, test_users[i]->final, test_users[i]->initial));
    }
    return aggregate(method, per_user);
  };

  // --- PRA: restart-walk scores with a train-tuned threshold ---
  const WalkGraph walk = build_walk_graph(pg);
  const double tau_rwr = tune_rwr_threshold(walk, train_pairs, cfg.rwr);
  say("restart-walk threshold tuned to " + std::to_string(tau_rwr));
  const auto preds_pra = predict_all([&](std::size_t i) {
    const PermissionSet& initial = test_users[i]->initial;
    if (initial.empty()) return initial;
    return rwr_predict(rwr_scores(walk, initial, cfg.rwr.restart, cfg.rwr.tol,
                                  cfg.rwr.max_iter),
                       initial, tau_rwr);
  });
  save_predictions(path_in("preds_pra.jsonl"), pg, preds_pra);

  // --- TransE: embeddings, distance table, train-tuned threshold ---
  const auto triples = triples_from(pg);
  const TranseResult emb = train_transe(triples, static_cast<int>(pg.size()), cfg.transe);
  const DistanceTable dt = build_distance_table(emb.model);
  const KindCompat compat = build_kind_compat(pg);
  const double tau_e = tune_transe_threshold(dt, compat, train_pairs, cfg.transe.max_hops);
  say("embedding threshold tuned to " + std::to_string(tau_e));
  const auto preds_transe = predict_all([&](std::size_t i) {
    return transe_predict(dt, compat, test_users[i]->initial, tau_e, cfg.transe.max_hops);
  });
  save_predictions(path_in("preds_transe.jsonl"), pg, preds_transe);

  // --- KGRGRL: train the policy, roll it out per test user ---
  std::vector<PermissionSet> train_sets;
  for (const auto& [initial, truth] : train_pairs) {
    (void)truth;
    train_sets.push_back(initial);
  }
  const TrainResult trained = train(kg, pg, train_sets, cfg.train);
  save_checkpoint(path_in("model.ckpt"), trained.params);
  if (!trained.epoch_mean_returns.empty()) {
    say("policy trained: first-epoch mean return " +
        std::to_string(trained.epoch_mean_returns.front()) + ", last " +
        std::to_string(trained.epoch_mean_returns.back()));
  }
  auto rollout_preds = [&](const PolicyParams& params) {
    return predict_all([&, params](std::size_t i) {
      TrainConfig per_user = cfg.train;
      per_user.seed = derive_seed(cfg.train.seed, 0xbeef0000u + i);
      return predict_permissions(kg, pg, params, test_users[i]->initial, per_user);
    });
  };
  const auto preds_kgrgrl = rollout_preds(trained.params);
  save_predictions(path_in("preds_kgrgrl.jsonl"), pg, preds_kgrgrl);

  // --- BOR: the oracle evaluated as a method ---
  const auto preds_bor =
      predict_all([&](std::size_t i) { return closure(kg, pg, test_users[i]->initial); });
  save_predictions(path_in("preds_bor.jsonl"), pg, preds_bor);

  PipelineResult result;
  result.rows.push_back(score("PRA", preds_pra));
  result.rows.push_back(score("TransE", preds_transe));
  result.rows.push_back(score("KGRGRL", preds_kgrgrl));
  result.rows.push_back(score("BOR", preds_bor));

  if (cfg.ablation) {
    // Same rollout protocol, untrained weights: isolates what learning adds.
    TrainConfig untrained_cfg = cfg.train;
    untrained_cfg.episodes = 0;
    const TrainResult untrained = train(kg, pg, train_sets, untrained_cfg);
    const auto preds_ablation = rollout_preds(untrained.params);
    save_predictions(path_in("preds_ablation.jsonl"), pg, preds_ablation);
    result.rows.push_back(score("Ablation", preds_ablation));
  }

  result.metrics_csv_path = path_in("metrics.csv");
  result.metrics_txt_path = path_in("metrics.txt");
  write_text_file(result.metrics_csv_path, render_csv(result.rows));
  write_text_file(result.metrics_txt_path, render_table(result.rows));
  say("metrics written to " + result.metrics_csv_path);

  RunManifest manifest;
  manifest.subcommand = "pipeline";
  manifest.config = cfg.raw;
  manifest.outputs["scenario"] = path_in("scenario.json");
  manifest.outputs["kg"] = path_in("kg.json");
  manifest.outputs["users"] = path_in("users.jsonl");
  manifest.outputs["split"] = path_in("split.json");
  manifest.outputs["truth"] = path_in("truth.jsonl");
  manifest.outputs["model"] = path_in("model.ckpt");
  manifest.outputs["metrics_csv"] = result.metrics_csv_path;
  manifest.outputs["metrics_txt"] = result.metrics_txt_path;
  write_manifest(result.metrics_csv_path, manifest);
  return result;
}

}  // namespace permkg
