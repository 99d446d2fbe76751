#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "permkg/errors.hpp"
#include "permkg/generator.hpp"
#include "permkg/knowledge_graph.hpp"
#include "permkg/permissions.hpp"
#include "permkg/rules.hpp"
#include "permkg/scenario.hpp"
#include "permkg/version.hpp"

namespace permkg {

// ---------------------------------------------------------------------------
// Knowledge-graph file: the scenario sections in normalized (sorted) form
// plus a read-only "derived" section describing the permission space. The
// file is itself a valid scenario document, so it can be rebuilt exactly.
// ---------------------------------------------------------------------------

inline nlohmann::json kg_to_json(const KnowledgeGraph& kg, const PermissionGraph& pg) {
  ScenarioSpec normalized;
  for (const auto& [id, e] : kg.entities()) normalized.entities.push_back(e);
  normalized.relations = kg.relations();
  normalized.security_rules = kg.security_rules();
  nlohmann::json doc = scenario_to_json(normalized);

  nlohmann::json derived;
  derived["permission_nodes"] = nlohmann::json::array();
  for (const auto& n : pg.nodes) derived["permission_nodes"].push_back(format_permission(n));
  derived["rule_instances"] = nlohmann::json::array();
  for (const auto& inst : pg.instances) {
    nlohmann::json ji{{"rule", inst.rule_id},
                      {"src", format_permission(inst.src)},
                      {"dst", format_permission(inst.dst)}};
    switch (inst.guard.type) {
      case Guard::Type::Always:
        ji["guard"] = "always";
        break;
      case Guard::Type::Never:
        ji["guard"] = "never";
        break;
      case Guard::Type::RequireAll: {
        nlohmann::json req = nlohmann::json::array();
        for (int i : inst.guard.required) {
          req.push_back(format_permission(pg.nodes[static_cast<std::size_t>(i)]));
        }
        ji["guard"] = req;
        break;
      }
    }
    derived["rule_instances"].push_back(ji);
  }
  doc["derived"] = derived;
  return doc;
}

inline void save_kg(const std::string& path, const KnowledgeGraph& kg,
                    const PermissionGraph& pg) {
  write_text_file(path, kg_to_json(kg, pg).dump(2) + "\n");
}

inline KnowledgeGraph load_kg(const std::string& path) {
  // The derived section is advisory output; the graph is rebuilt from the
  // scenario sections, which re-validates everything.
  return build_kg(parse_scenario(read_text_file(path)));
}

// ---------------------------------------------------------------------------
// Line-delimited user records.
//   users.jsonl: {"user_id", "initial": [literals], "final": [literals]}
//   preds.jsonl: {"user_id", "permissions": [literals]}
//   truth.jsonl: {"user_id", "permissions": [literals], "initial": [literals]}
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<nlohmann::json> parse_jsonl(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    if (!out.back().is_object()) throw ParseError(line_no, "record must be a JSON object");
  }
  return out;
}

inline nlohmann::json literal_array(const PermissionGraph& pg, const PermissionSet& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& lit : pg.literals_from_set(s)) arr.push_back(lit);
  return arr;
}

inline PermissionSet set_from_json(const PermissionGraph& pg, const nlohmann::json& rec,
                                   const char* key) {
  if (!rec.contains(key) || !rec.at(key).is_array()) {
    throw ParseError(0, std::string("record needs an array \"") + key + "\" field");
  }
  std::vector<std::string> literals;
  for (const auto& v : rec.at(key)) {
    if (!v.is_string()) throw ParseError(0, std::string(key) + " entries must be strings");
    literals.push_back(v.get<std::string>());
  }
  return pg.set_from_literals(literals);
}

}  // namespace detail

inline void save_users(const std::string& path, const PermissionGraph& pg,
                       const std::vector<UserRecord>& users) {
  std::string out;
  for (const auto& u : users) {
    nlohmann::json rec{{"user_id", u.id},
                       {"initial", detail::literal_array(pg, u.initial)},
                       {"final", detail::literal_array(pg, u.final)}};
    out += rec.dump() + "\n";
  }
  write_text_file(path, out);
}

inline std::vector<UserRecord> load_users(const std::string& path, const PermissionGraph& pg) {
  std::vector<UserRecord> users;
  for (const auto& rec : detail::parse_jsonl(read_text_file(path))) {
    UserRecord u;
    u.id = detail::require_string(rec, "user_id", "user record");
    u.initial = detail::set_from_json(pg, rec, "initial");
    u.final = rec.contains("final") ? detail::set_from_json(pg, rec, "final") : u.initial;
    users.push_back(std::move(u));
  }
  return users;
}

inline void save_predictions(const std::string& path, const PermissionGraph& pg,
                             const std::vector<std::pair<std::string, PermissionSet>>& preds) {
  std::string out;
  for (const auto& [id, set] : preds) {
    nlohmann::json rec{{"user_id", id}, {"permissions", detail::literal_array(pg, set)}};
    out += rec.dump() + "\n";
  }
  write_text_file(path, out);
}

inline std::vector<std::pair<std::string, PermissionSet>> load_predictions(
    const std::string& path, const PermissionGraph& pg) {
  std::vector<std::pair<std::string, PermissionSet>> preds;
  for (const auto& rec : detail::parse_jsonl(read_text_file(path))) {
    preds.emplace_back(detail::require_string(rec, "user_id", "prediction record"),
                       detail::set_from_json(pg, rec, "permissions"));
  }
  return preds;
}

struct TruthRecord {
  std::string id;
  PermissionSet permissions;  // the oracle closure
  PermissionSet initial;
};

inline void save_truth(const std::string& path, const PermissionGraph& pg,
                       const std::vector<UserRecord>& users) {
  std::string out;
  for (const auto& u : users) {
    nlohmann::json rec{{"user_id", u.id},
                       {"permissions", detail::literal_array(pg, u.final)},
                       {"initial", detail::literal_array(pg, u.initial)}};
    out += rec.dump() + "\n";
  }
  write_text_file(path, out);
}

// Literal-string variants: evaluation artifacts stand on their own, no
// graph required to score them.
namespace detail {

inline std::set<std::string> literal_set_from_json(const nlohmann::json& rec,
                                                   const char* key) {
  if (!rec.contains(key) || !rec.at(key).is_array()) {
    throw ParseError(0, std::string("record needs an array \"") + key + "\" field");
  }
  std::set<std::string> out;
  for (const auto& v : rec.at(key)) {
    if (!v.is_string()) throw ParseError(0, std::string(key) + " entries must be strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

struct LiteralTruthRecord {
  std::string id;
  std::set<std::string> permissions;
  std::set<std::string> initial;
};

inline std::vector<LiteralTruthRecord> load_truth_literals(const std::string& path) {
  std::vector<LiteralTruthRecord> out;
  for (const auto& rec : detail::parse_jsonl(read_text_file(path))) {
    LiteralTruthRecord t;
    t.id = detail::require_string(rec, "user_id", "truth record");
    t.permissions = detail::literal_set_from_json(rec, "permissions");
    t.initial = rec.contains("initial") ? detail::literal_set_from_json(rec, "initial")
                                        : std::set<std::string>{};
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<std::pair<std::string, std::set<std::string>>> load_prediction_literals(
    const std::string& path) {
  std::vector<std::pair<std::string, std::set<std::string>>> out;
  for (const auto& rec : detail::parse_jsonl(read_text_file(path))) {
    out.emplace_back(detail::require_string(rec, "user_id", "prediction record"),
                     detail::literal_set_from_json(rec, "permissions"));
  }
  return out;
}

inline std::vector<TruthRecord> load_truth(const std::string& path,
                                           const PermissionGraph& pg) {
  std::vector<TruthRecord> out;
  for (const auto& rec : detail::parse_jsonl(read_text_file(path))) {
    TruthRecord t;
    t.id = detail::require_string(rec, "user_id", "truth record");
    t.permissions = detail::set_from_json(pg, rec, "permissions");
    t.initial = detail::set_from_json(pg, rec, "initial");
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split manifest and run manifests.
// ---------------------------------------------------------------------------

inline void save_split(const std::string& path, const std::vector<std::string>& train_ids,
                       const std::vector<std::string>& test_ids) {
  nlohmann::json doc{{"train", train_ids}, {"test", test_ids}};
  write_text_file(path, doc.dump(2) + "\n");
}

struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

inline SplitManifest load_split(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_object() || !doc.contains("train") || !doc.contains("test")) {
    throw ParseError(0, "split manifest needs \"train\" and \"test\" arrays");
  }
  SplitManifest split;
  for (const auto& v : doc["train"]) split.train.push_back(v.get<std::string>());
  for (const auto& v : doc["test"]) split.test.push_back(v.get<std::string>());
  return split;
}

// Reproducibility record written next to every artifact: the subcommand,
// the resolved configuration, and the file paths involved. Re-running the
// recorded subcommand with the recorded config reproduces the artifact.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;

  nlohmann::json to_json() const {
    return nlohmann::json{{"tool_version", kVersion},
                          {"subcommand", subcommand},
                          {"config", config},
                          {"inputs", inputs},
                          {"outputs", outputs}};
  }
};

inline void write_manifest(const std::string& artifact_path, const RunManifest& m) {
  write_text_file(artifact_path + ".manifest.json", m.to_json().dump(2) + "\n");
}

}  // namespace permkg
