// permkg: command-line front end for the permission-reasoning toolkit.
//
// Subcommands: gen, build, closure, train, predict, baseline (rwr|transe),
// eval, pipeline. Exit codes: 0 success, 2 configuration error, 3 data
// error, 4 numeric failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "permkg/env.hpp"
#include "permkg/errors.hpp"
#include "permkg/generator.hpp"
#include "permkg/io.hpp"
#include "permkg/metrics.hpp"
#include "permkg/pipeline.hpp"
#include "permkg/policy.hpp"
#include "permkg/rules.hpp"
#include "permkg/rwr.hpp"
#include "permkg/transe.hpp"
#include "permkg/version.hpp"

namespace {

using namespace permkg;

nlohmann::json parse_json_config(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

std::vector<std::string> split_literals(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string file_stem(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

nlohmann::json gen_config_json(const GenConfig& g) {
  return nlohmann::json{{"seed", g.seed},
                        {"n_rooms", g.n_rooms},
                        {"n_devices", g.n_devices},
                        {"n_services", g.n_services},
                        {"n_files", g.n_files},
                        {"n_info", g.n_info},
                        {"p_password", g.p_password},
                        {"p_encrypt", g.p_encrypt},
                        {"p_guard", g.p_guard},
                        {"n_users", g.n_users},
                        {"train_frac", g.train_frac}};
}

struct SplitSides {
  std::vector<const UserRecord*> train;
  std::vector<const UserRecord*> predict;  // test side, or everyone without a split
};

SplitSides apply_split(const std::vector<UserRecord>& users, const std::string& split_path) {
  SplitSides sides;
  if (split_path.empty()) {
    for (const auto& u : users) {
      sides.train.push_back(&u);
      sides.predict.push_back(&u);
    }
    return sides;
  }
  const SplitManifest split = load_split(split_path);
  std::map<std::string, const UserRecord*> by_id;
  for (const auto& u : users) by_id[u.id] = &u;
  auto pick = [&by_id](const std::vector<std::string>& ids,
                       std::vector<const UserRecord*>& out) {
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw DanglingReferenceError("split references " + id);
      out.push_back(it->second);
    }
  };
  pick(split.train, sides.train);
  pick(split.test, sides.predict);
  return sides;
}

int do_gen(const std::string& config_path, const std::string& out_dir, bool seed_set,
           std::uint64_t seed) {
  nlohmann::json doc = parse_json_config(config_path);
  // Accept a whole pipeline config too: its "gen" section is the generator
  // config, so the same file drives both subcommands.
  if (doc.contains("gen") && doc.at("gen").is_object()) doc = doc.at("gen");
  GenConfig cfg = parse_gen_config(doc);
  if (seed_set) cfg.seed = seed;

  const ScenarioSpec spec = generate_topology(cfg);
  const KnowledgeGraph kg = build_kg(spec);
  const PermissionGraph pg = derive_permission_space(kg);
  const LabeledDataset ds = generate_users(kg, pg, cfg);

  auto path_in = [&out_dir](const char* name) { return out_dir + "/" + name; };
  write_text_file(path_in("scenario.json"), serialize_scenario(spec));
  save_kg(path_in("kg.json"), kg, pg);
  save_users(path_in("users.jsonl"), pg, ds.users);
  save_split(path_in("split.json"), ds.train_ids, ds.test_ids);
  std::vector<UserRecord> test_records;
  {
    std::map<std::string, const UserRecord*> by_id;
    for (const auto& u : ds.users) by_id[u.id] = &u;
    for (const auto& id : ds.test_ids) test_records.push_back(*by_id.at(id));
  }
  save_truth(path_in("truth.jsonl"), pg, test_records);

  RunManifest manifest;
  manifest.subcommand = "gen";
  manifest.config = gen_config_json(cfg);
  manifest.inputs["config"] = config_path;
  manifest.outputs["scenario"] = path_in("scenario.json");
  manifest.outputs["kg"] = path_in("kg.json");
  manifest.outputs["users"] = path_in("users.jsonl");
  manifest.outputs["split"] = path_in("split.json");
  manifest.outputs["truth"] = path_in("truth.jsonl");
  write_text_file(out_dir + "/gen.manifest.json", manifest.to_json().dump(2) + "\n");

  std::cout << "generated " << ds.users.size() << " users over " << kg.entities().size()
            << " entities (" << pg.size() << " permission nodes) into " << out_dir << "\n";
  return 0;
}

int do_build(const std::string& scenario_path, const std::string& out_path) {
  const KnowledgeGraph kg = build_kg(load_scenario(scenario_path));
  const PermissionGraph pg = derive_permission_space(kg);
  save_kg(out_path, kg, pg);

  RunManifest manifest;
  manifest.subcommand = "build";
  manifest.inputs["scenario"] = scenario_path;
  manifest.outputs["kg"] = out_path;
  write_manifest(out_path, manifest);

  std::cout << "built graph: " << kg.entities().size() << " entities, "
            << kg.relations().size() << " relations, " << pg.size() << " permission nodes, "
            << pg.instances.size() << " rule instances -> " << out_path << "\n";
  return 0;
}

int do_closure(const std::string& kg_path, const std::string& initial_literals,
               const std::string& out_path) {
  const KnowledgeGraph kg = load_kg(kg_path);
  const PermissionGraph pg = derive_permission_space(kg);
  const PermissionSet initial = pg.set_from_literals(split_literals(initial_literals));
  const PermissionSet final_set = closure(kg, pg, initial);

  nlohmann::json doc{{"initial", detail::literal_array(pg, initial)},
                     {"final", detail::literal_array(pg, final_set)}};
  write_text_file(out_path, doc.dump(2) + "\n");

  RunManifest manifest;
  manifest.subcommand = "closure";
  manifest.config = nlohmann::json{{"initial", initial_literals}};
  manifest.inputs["kg"] = kg_path;
  manifest.outputs["closure"] = out_path;
  write_manifest(out_path, manifest);

  std::cout << final_set.count() << " permissions in closure (from " << initial.count()
            << " initial) -> " << out_path << "\n";
  return 0;
}

int do_train(const std::string& kg_path, const std::string& users_path,
             const std::string& config_path, const std::string& split_path, bool seed_set,
             std::uint64_t seed, const std::string& out_path, const std::string& trace_path) {
  const KnowledgeGraph kg = load_kg(kg_path);
  const PermissionGraph pg = derive_permission_space(kg);
  TrainConfig cfg = config_path.empty()
                        ? TrainConfig{}
                        : parse_train_config(parse_json_config(config_path));
  if (seed_set) cfg.seed = seed;

  const std::vector<UserRecord> users = load_users(users_path, pg);
  const SplitSides sides = apply_split(users, split_path);
  std::vector<PermissionSet> train_sets;
  for (const UserRecord* u : sides.train) train_sets.push_back(u->initial);
  if (train_sets.empty()) throw ConfigError("no users to train on");

  std::ofstream trace_file;
  std::ostream* trace_out = nullptr;
  if (!trace_path.empty()) {
    trace_file.open(trace_path, std::ios::trunc);
    if (!trace_file) throw IoError("cannot write trace file: " + trace_path);
    trace_out = &trace_file;
  }

  const TrainResult result = train(kg, pg, train_sets, cfg, trace_out);
  save_checkpoint(out_path, result.params);

  RunManifest manifest;
  manifest.subcommand = "train";
  manifest.config = nlohmann::json{{"h1", cfg.h1},
                                   {"h2", cfg.h2},
                                   {"lr", cfg.lr},
                                   {"episodes", cfg.episodes},
                                   {"gamma", cfg.gamma},
                                   {"seed", cfg.seed},
                                   {"rollouts_per_start", cfg.rollouts_per_start},
                                   {"max_path_length", cfg.max_path_length}};
  manifest.inputs["kg"] = kg_path;
  manifest.inputs["users"] = users_path;
  if (!split_path.empty()) manifest.inputs["split"] = split_path;
  manifest.outputs["model"] = out_path;
  if (!trace_path.empty()) manifest.outputs["trace"] = trace_path;
  write_manifest(out_path, manifest);

  std::cout << "trained on " << train_sets.size() << " users for " << cfg.episodes
            << " episodes";
  if (!result.epoch_mean_returns.empty()) {
    std::cout << "; mean return " << result.epoch_mean_returns.front() << " -> "
              << result.epoch_mean_returns.back();
  }
  std::cout << " -> " << out_path << "\n";
  return 0;
}

int do_predict(const std::string& model_path, const std::string& kg_path,
               const std::string& user_literals, bool seed_set, std::uint64_t seed,
               int rollouts, int max_path) {
  const KnowledgeGraph kg = load_kg(kg_path);
  const PermissionGraph pg = derive_permission_space(kg);
  const PolicyParams params = load_checkpoint(model_path);
  if (params.state_dim() != 2 * static_cast<Eigen::Index>(pg.size())) {
    throw ConfigError("checkpoint shape does not match this knowledge graph");
  }
  TrainConfig cfg;
  if (seed_set) cfg.seed = seed;
  if (rollouts > 0) cfg.rollouts_per_start = rollouts;
  if (max_path > 0) cfg.max_path_length = max_path;

  const PermissionSet initial = pg.set_from_literals(split_literals(user_literals));
  const PermissionSet predicted = predict_permissions(kg, pg, params, initial, cfg);
  nlohmann::json doc{{"initial", detail::literal_array(pg, initial)},
                     {"predicted", detail::literal_array(pg, predicted)}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int do_baseline_rwr(const std::string& kg_path, const std::string& users_path,
                    const std::string& split_path, const std::string& out_path,
                    RwrConfig cfg, double tau, bool tau_set) {
  const KnowledgeGraph kg = load_kg(kg_path);
  const PermissionGraph pg = derive_permission_space(kg);
  const std::vector<UserRecord> users = load_users(users_path, pg);
  const SplitSides sides = apply_split(users, split_path);
  const WalkGraph walk = build_walk_graph(pg);

  if (!tau_set) {
    std::vector<std::pair<PermissionSet, PermissionSet>> pairs;
    for (const UserRecord* u : sides.train) pairs.emplace_back(u->initial, u->final);
    tau = tune_rwr_threshold(walk, pairs, cfg);
    std::cerr << "tuned threshold: " << tau << "\n";
  }

  std::vector<std::pair<std::string, PermissionSet>> preds;
  for (const UserRecord* u : sides.predict) {
    PermissionSet p = u->initial;
    if (!u->initial.empty()) {
      p = rwr_predict(rwr_scores(walk, u->initial, cfg.restart, cfg.tol, cfg.max_iter),
                      u->initial, tau);
    }
    preds.emplace_back(u->id, p);
  }
  save_predictions(out_path, pg, preds);

  RunManifest manifest;
  manifest.subcommand = "baseline rwr";
  manifest.config = nlohmann::json{{"restart", cfg.restart},
                                   {"tol", cfg.tol},
                                   {"max_iter", cfg.max_iter},
                                   {"tau", tau}};
  manifest.inputs["kg"] = kg_path;
  manifest.inputs["users"] = users_path;
  if (!split_path.empty()) manifest.inputs["split"] = split_path;
  manifest.outputs["predictions"] = out_path;
  write_manifest(out_path, manifest);

  std::cout << preds.size() << " predictions -> " << out_path << "\n";
  return 0;
}

int do_baseline_transe(const std::string& kg_path, const std::string& users_path,
                       const std::string& split_path, const std::string& out_path,
                       TranseConfig cfg, double tau, bool tau_set) {
  const KnowledgeGraph kg = load_kg(kg_path);
  const PermissionGraph pg = derive_permission_space(kg);
  const std::vector<UserRecord> users = load_users(users_path, pg);
  const SplitSides sides = apply_split(users, split_path);

  const auto triples = triples_from(pg);
  const TranseResult trained = train_transe(triples, static_cast<int>(pg.size()), cfg);
  const DistanceTable dt = build_distance_table(trained.model);
  const KindCompat compat = build_kind_compat(pg);

  if (!tau_set) {
    std::vector<std::pair<PermissionSet, PermissionSet>> pairs;
    for (const UserRecord* u : sides.train) pairs.emplace_back(u->initial, u->final);
    tau = tune_transe_threshold(dt, compat, pairs, cfg.max_hops);
    std::cerr << "tuned threshold: " << tau << "\n";
  }

  std::vector<std::pair<std::string, PermissionSet>> preds;
  for (const UserRecord* u : sides.predict) {
    preds.emplace_back(u->id, transe_predict(dt, compat, u->initial, tau, cfg.max_hops));
  }
  save_predictions(out_path, pg, preds);

  RunManifest manifest;
  manifest.subcommand = "baseline transe";
  manifest.config = nlohmann::json{{"dim", cfg.dim},       {"margin", cfg.margin},
                                   {"lr", cfg.lr},         {"epochs", cfg.epochs},
                                   {"seed", cfg.seed},     {"max_hops", cfg.max_hops},
                                   {"tau", tau}};
  manifest.inputs["kg"] = kg_path;
  manifest.inputs["users"] = users_path;
  if (!split_path.empty()) manifest.inputs["split"] = split_path;
  manifest.outputs["predictions"] = out_path;
  write_manifest(out_path, manifest);

  std::cout << preds.size() << " predictions -> " << out_path << "\n";
  return 0;
}

int do_eval(const std::string& truth_path, const std::vector<std::string>& pred_paths,
            std::vector<std::string> methods, const std::string& out_path) {
  const std::vector<LiteralTruthRecord> truth = load_truth_literals(truth_path);
  std::map<std::string, const LiteralTruthRecord*> by_id;
  for (const auto& t : truth) by_id[t.id] = &t;

  if (methods.empty()) {
    for (const auto& p : pred_paths) methods.push_back(file_stem(p));
  }
  if (methods.size() != pred_paths.size()) {
    throw ConfigError("--method count must match --pred count");
  }

  std::vector<MetricsRow> rows;
  for (std::size_t m = 0; m < pred_paths.size(); ++m) {
    const auto preds = load_prediction_literals(pred_paths[m]);
    std::vector<Confusion> per_user;
    std::size_t matched = 0;
    for (const auto& [id, pred] : preds) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw DanglingReferenceError("prediction for unknown user " + id);
      }
      ++matched;
      per_user.push_back(confusion(pred, it->second->permissions, it->second->initial));
    }
    if (matched != truth.size()) {
      throw Error("predictions cover " + std::to_string(matched) + " of " +
                  std::to_string(truth.size()) + " truth users");
    }
    rows.push_back(aggregate(methods[m], per_user));
  }

  write_text_file(out_path, render_csv(rows));
  RunManifest manifest;
  manifest.subcommand = "eval";
  manifest.inputs["truth"] = truth_path;
  for (std::size_t m = 0; m < pred_paths.size(); ++m) {
    manifest.inputs["pred:" + methods[m]] = pred_paths[m];
  }
  manifest.outputs["metrics"] = out_path;
  write_manifest(out_path, manifest);

  std::cout << render_table(rows);
  return 0;
}

int do_pipeline(const std::string& config_path, const std::string& out_dir, bool seed_set,
                std::uint64_t seed, int jobs, bool jobs_set) {
  nlohmann::json j = parse_json_config(config_path);
  if (seed_set) j["gen"]["seed"] = seed;
  PipelineConfig cfg = parse_pipeline_config(j);
  if (jobs_set) cfg.jobs = jobs;

  const PipelineResult result = run_pipeline(cfg, out_dir, &std::cerr);
  std::cout << render_table(result.rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permkg: multi-domain permission reasoning toolkit"};
  app.set_version_flag("--version", std::string(permkg::kVersion));
  app.require_subcommand(1);

  // gen
  std::string gen_config, gen_out_dir;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scenario and user population");
  gen->add_option("--config", gen_config, "Generator config (JSON)")->required();
  gen->add_option("--out-dir", gen_out_dir, "Output directory (must exist)")->required();
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Override the config seed");

  // build
  std::string build_scenario, build_out;
  auto* build = app.add_subcommand("build", "Validate a scenario and build the graph");
  build->add_option("--scenario", build_scenario, "Scenario file (JSON)")->required();
  build->add_option("--out", build_out, "Output graph file")->required();

  // closure
  std::string clo_kg, clo_initial, clo_out;
  auto* clo = app.add_subcommand("closure", "Compute the rule closure of a permission set");
  clo->add_option("--kg", clo_kg, "Graph file")->required();
  clo->add_option("--initial", clo_initial, "Comma-separated permission literals")
      ->required();
  clo->add_option("--out", clo_out, "Output file")->required();

  // train
  std::string tr_kg, tr_users, tr_config, tr_split, tr_out, tr_trace;
  std::uint64_t tr_seed = 0;
  auto* tr = app.add_subcommand("train", "Train the policy network");
  tr->add_option("--kg", tr_kg, "Graph file")->required();
  tr->add_option("--users", tr_users, "Users file (JSON lines)")->required();
  tr->add_option("--config", tr_config, "Training config (JSON)");
  tr->add_option("--split", tr_split, "Split manifest: train on its train side");
  auto* tr_seed_opt = tr->add_option("--seed", tr_seed, "Override the config seed");
  tr->add_option("--out", tr_out, "Checkpoint output path")->required();
  tr->add_option("--trace", tr_trace, "Write per-step episode traces (JSON lines)");

  // predict
  std::string pr_model, pr_kg, pr_user;
  std::uint64_t pr_seed = 0;
  int pr_rollouts = 0, pr_max_path = 0;
  auto* pr = app.add_subcommand("predict", "Predict a user's reachable permissions");
  pr->add_option("--model", pr_model, "Checkpoint file")->required();
  pr->add_option("--kg", pr_kg, "Graph file")->required();
  pr->add_option("--user", pr_user, "Comma-separated initial permission literals")
      ->required();
  auto* pr_seed_opt = pr->add_option("--seed", pr_seed, "Rollout seed");
  pr->add_option("--rollouts", pr_rollouts, "Rollouts per start permission");
  pr->add_option("--max-path", pr_max_path, "Episode length cap");

  // baseline
  auto* base = app.add_subcommand("baseline", "Run a comparison method");
  base->require_subcommand(1);
  std::string bw_kg, bw_users, bw_split, bw_out;
  double bw_restart = 0.15, bw_tol = 1e-10, bw_tau = 0.0;
  long bw_max_iter = 10000;
  auto* bw = base->add_subcommand("rwr", "Random walk with restart");
  bw->add_option("--kg", bw_kg, "Graph file")->required();
  bw->add_option("--users", bw_users, "Users file (JSON lines)")->required();
  bw->add_option("--split", bw_split, "Split manifest: tune on train, predict test");
  bw->add_option("--out", bw_out, "Predictions output (JSON lines)")->required();
  bw->add_option("--restart", bw_restart, "Restart probability");
  bw->add_option("--tol", bw_tol, "Convergence tolerance (L1)");
  bw->add_option("--max-iter", bw_max_iter, "Iteration cap");
  auto* bw_tau_opt = bw->add_option("--tau", bw_tau, "Score threshold (skips tuning)");

  std::string bt_kg, bt_users, bt_split, bt_out;
  int bt_dim = 50, bt_epochs = 500, bt_hops = 5;
  double bt_margin = 1.0, bt_lr = 0.01, bt_tau = 0.0;
  std::uint64_t bt_seed = 42;
  auto* bt = base->add_subcommand("transe", "Translation-embedding link prediction");
  bt->add_option("--kg", bt_kg, "Graph file")->required();
  bt->add_option("--users", bt_users, "Users file (JSON lines)")->required();
  bt->add_option("--split", bt_split, "Split manifest: tune on train, predict test");
  bt->add_option("--out", bt_out, "Predictions output (JSON lines)")->required();
  bt->add_option("--dim", bt_dim, "Embedding dimension");
  bt->add_option("--margin", bt_margin, "Ranking margin");
  bt->add_option("--lr", bt_lr, "Learning rate");
  bt->add_option("--epochs", bt_epochs, "Training epochs");
  bt->add_option("--max-hops", bt_hops, "Prediction expansion cap");
  bt->add_option("--seed", bt_seed, "Embedding training seed");
  auto* bt_tau_opt = bt->add_option("--tau", bt_tau, "Distance threshold (skips tuning)");

  // eval
  std::string ev_truth, ev_out;
  std::vector<std::string> ev_preds, ev_methods;
  auto* ev = app.add_subcommand("eval", "Score predictions against oracle labels");
  ev->add_option("--truth", ev_truth, "Truth file (JSON lines)")->required();
  ev->add_option("--pred", ev_preds, "Prediction file (repeatable)")->required();
  ev->add_option("--method", ev_methods, "Method name per --pred (defaults to file stem)");
  ev->add_option("--out", ev_out, "Metrics CSV output")->required();

  // pipeline
  std::string pl_config, pl_out_dir;
  std::uint64_t pl_seed = 0;
  int pl_jobs = 0;
  auto* pl = app.add_subcommand("pipeline", "Run the full benchmark end to end");
  pl->add_option("--config", pl_config, "Pipeline config (JSON)")->required();
  pl->add_option("--out-dir", pl_out_dir, "Output directory (must exist)")->required();
  auto* pl_seed_opt = pl->add_option("--seed", pl_seed, "Override the dataset seed");
  auto* pl_jobs_opt = pl->add_option("--jobs", pl_jobs, "Worker cap for per-user stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(gen)) {
      return do_gen(gen_config, gen_out_dir, gen_seed_opt->count() > 0, gen_seed);
    }
    if (app.got_subcommand(build)) return do_build(build_scenario, build_out);
    if (app.got_subcommand(clo)) return do_closure(clo_kg, clo_initial, clo_out);
    if (app.got_subcommand(tr)) {
      return do_train(tr_kg, tr_users, tr_config, tr_split, tr_seed_opt->count() > 0,
                      tr_seed, tr_out, tr_trace);
    }
    if (app.got_subcommand(pr)) {
      return do_predict(pr_model, pr_kg, pr_user, pr_seed_opt->count() > 0, pr_seed,
                        pr_rollouts, pr_max_path);
    }
    if (app.got_subcommand(base)) {
      if (base->got_subcommand(bw)) {
        RwrConfig cfg;
        cfg.restart = bw_restart;
        cfg.tol = bw_tol;
        cfg.max_iter = bw_max_iter;
        return do_baseline_rwr(bw_kg, bw_users, bw_split, bw_out, cfg, bw_tau,
                               bw_tau_opt->count() > 0);
      }
      if (base->got_subcommand(bt)) {
        TranseConfig cfg;
        cfg.dim = bt_dim;
        cfg.margin = bt_margin;
        cfg.lr = bt_lr;
        cfg.epochs = bt_epochs;
        cfg.max_hops = bt_hops;
        cfg.seed = bt_seed;
        return do_baseline_transe(bt_kg, bt_users, bt_split, bt_out, cfg, bt_tau,
                                  bt_tau_opt->count() > 0);
      }
    }
    if (app.got_subcommand(ev)) return do_eval(ev_truth, ev_preds, ev_methods, ev_out);
    if (app.got_subcommand(pl)) {
      return do_pipeline(pl_config, pl_out_dir, pl_seed_opt->count() > 0, pl_seed, pl_jobs,
                         pl_jobs_opt->count() > 0);
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const permkg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const permkg::NonConvergenceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const permkg::NonFiniteGradientError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const permkg::EmptyActionMaskError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const permkg::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
