#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "permkg/entities.hpp"
#include "permkg/errors.hpp"

namespace permkg {

// Parsed declarative scenario, faithful to the document (no reordering, no
// dedup). Validation of cross references happens at graph build time.
struct ScenarioSpec {
  std::vector<Entity> entities;
  std::vector<Relation> relations;
  std::vector<SecurityRule> security_rules;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const char* where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw ParseError(0, std::string(where) + " needs a string \"" + key + "\" field");
  }
  return obj[key].get<std::string>();
}

}  // namespace detail

inline ScenarioSpec parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(detail::line_of_offset(text, e.byte), e.what());
  }
  if (!doc.is_object()) throw ParseError(0, "document must be a JSON object");
  if (!doc.contains("entities")) throw ParseError(0, "missing required \"entities\" section");
  if (!doc["entities"].is_array()) throw ParseError(0, "\"entities\" must be an array");

  ScenarioSpec spec;
  std::unordered_set<std::string> seen;
  for (const auto& e : doc["entities"]) {
    if (!e.is_object()) throw ParseError(0, "entity entries must be objects");
    Entity ent;
    ent.id = detail::require_string(e, "id", "entity");
    if (ent.id.empty()) throw ParseError(0, "entity id must be non-empty");
    const std::string kind = detail::require_string(e, "kind", "entity");
    auto k = entity_kind_from_string(kind);
    if (!k) throw UnknownEntityKindError(kind);
    ent.kind = *k;
    if (e.contains("attrs")) {
      if (!e["attrs"].is_object())
        throw ParseError(0, "entity \"" + ent.id + "\": attrs must be an object");
      const auto& schema = attr_schema(ent.kind);
      for (const auto& [key, val] : e["attrs"].items()) {
        if (std::find(schema.begin(), schema.end(), key) == schema.end()) {
          throw ParseError(0, "entity \"" + ent.id + "\": attr \"" + key +
                                  "\" is not in the " + to_string(ent.kind) + " schema");
        }
        if (!val.is_string())
          throw ParseError(0, "entity \"" + ent.id + "\": attr values must be strings");
        ent.attrs[key] = val.get<std::string>();
      }
    }
    if (!seen.insert(ent.id).second) throw DuplicateIdError(ent.id);
    spec.entities.push_back(std::move(ent));
  }

  if (doc.contains("relations")) {
    if (!doc["relations"].is_array()) throw ParseError(0, "\"relations\" must be an array");
    for (const auto& r : doc["relations"]) {
      if (!r.is_object()) throw ParseError(0, "relation entries must be objects");
      Relation rel;
      rel.src = detail::require_string(r, "src", "relation");
      rel.dst = detail::require_string(r, "dst", "relation");
      const std::string kind = detail::require_string(r, "kind", "relation");
      auto k = relation_kind_from_string(kind);
      if (!k) throw ParseError(0, "unknown relation kind: " + kind);
      rel.kind = *k;
      spec.relations.push_back(std::move(rel));
    }
  }

  if (doc.contains("security_rules")) {
    if (!doc["security_rules"].is_array())
      throw ParseError(0, "\"security_rules\" must be an array");
    for (const auto& s : doc["security_rules"]) {
      if (!s.is_object()) throw ParseError(0, "security rule entries must be objects");
      SecurityRule rule;
      rule.subject = detail::require_string(s, "subject", "security rule");
      const std::string pred = detail::require_string(s, "predicate", "security rule");
      auto p = security_predicate_from_string(pred);
      if (!p) throw ParseError(0, "unknown security predicate: " + pred);
      rule.predicate = *p;
      if (s.contains("object") && !s["object"].is_null()) {
        if (!s["object"].is_string())
          throw ParseError(0, "security rule object must be a string or null");
        rule.object = s["object"].get<std::string>();
      }
      spec.security_rules.push_back(std::move(rule));
    }
  }
  return spec;
}

inline nlohmann::json scenario_to_json(const ScenarioSpec& spec) {
  nlohmann::json doc;
  doc["entities"] = nlohmann::json::array();
  for (const auto& e : spec.entities) {
    nlohmann::json je{{"id", e.id}, {"kind", to_string(e.kind)}};
    if (!e.attrs.empty()) {
      nlohmann::json attrs = nlohmann::json::object();
      for (const auto& [k, v] : e.attrs) attrs[k] = v;
      je["attrs"] = attrs;
    }
    doc["entities"].push_back(je);
  }
  doc["relations"] = nlohmann::json::array();
  for (const auto& r : spec.relations) {
    doc["relations"].push_back({{"src", r.src}, {"kind", to_string(r.kind)}, {"dst", r.dst}});
  }
  doc["security_rules"] = nlohmann::json::array();
  for (const auto& s : spec.security_rules) {
    nlohmann::json js{{"subject", s.subject}, {"predicate", to_string(s.predicate)}};
    js["object"] = s.object ? nlohmann::json(*s.object) : nlohmann::json(nullptr);
    doc["security_rules"].push_back(js);
  }
  return doc;
}

inline std::string serialize_scenario(const ScenarioSpec& spec) {
  return scenario_to_json(spec).dump(2) + "\n";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

inline ScenarioSpec load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

}  // namespace permkg
