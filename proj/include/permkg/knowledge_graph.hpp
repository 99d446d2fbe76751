#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "permkg/entities.hpp"
#include "permkg/errors.hpp"
#include "permkg/scenario.hpp"

namespace permkg {

// Typed multi-domain graph. Immutable once built; entities and relations are
// kept in sorted order so every derived artifact is reproducible.
class KnowledgeGraph {
 public:
  const std::map<std::string, Entity>& entities() const { return entities_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const std::vector<SecurityRule>& security_rules() const { return security_rules_; }

  bool has_entity(const std::string& id) const { return entities_.count(id) != 0; }

  const Entity& entity(const std::string& id) const {
    auto it = entities_.find(id);
    if (it == entities_.end()) throw DanglingReferenceError(id);
    return it->second;
  }

  // Targets of (src, kind), sorted by id. Empty when none.
  const std::vector<std::string>& adjacent(const std::string& src, RelationKind kind) const {
    static const std::vector<std::string> empty;
    auto it = adjacency_.find({src, kind});
    return it == adjacency_.end() ? empty : it->second;
  }

  bool has_relation(const std::string& src, RelationKind kind, const std::string& dst) const {
    const auto& v = adjacent(src, kind);
    return std::binary_search(v.begin(), v.end(), dst);
  }

  // Credential entities required to enter a space / control a service /
  // decrypt a file, and subjects whose constraint names no credential at all
  // (those can never be satisfied).
  const std::vector<std::string>& required_credentials(const std::string& subject) const {
    static const std::vector<std::string> empty;
    auto it = credentials_.find(subject);
    return it == credentials_.end() ? empty : it->second;
  }

  bool is_unconditionally_denied(const std::string& subject) const {
    return unconditional_deny_.count(subject) != 0;
  }

  bool is_encrypted(const std::string& file_id) const {
    return !adjacent(file_id, RelationKind::EncryptedWith).empty() ||
           is_unconditionally_denied(file_id);
  }

  friend KnowledgeGraph build_kg(const ScenarioSpec& spec);

 private:
  std::map<std::string, Entity> entities_;
  std::vector<Relation> relations_;
  std::vector<SecurityRule> security_rules_;
  std::map<std::pair<std::string, RelationKind>, std::vector<std::string>> adjacency_;
  std::map<std::string, std::vector<std::string>> credentials_;
  std::set<std::string> unconditional_deny_;
};

// Builds the typed graph from a parsed scenario: entities become typed nodes,
// relations become signature-checked edges, security rules materialize as
// credential edges (GuardedBy / AuthenticatedBy / EncryptedWith) plus an
// unsatisfiable-constraint set for rules that name no credential.
inline KnowledgeGraph build_kg(const ScenarioSpec& spec) {
  KnowledgeGraph kg;
  for (const auto& e : spec.entities) {
    auto [it, inserted] = kg.entities_.emplace(e.id, e);
    if (!inserted) throw DuplicateIdError(e.id);
  }

  auto check_edge = [&](const Relation& r) {
    if (!kg.has_entity(r.src)) throw DanglingReferenceError(r.src);
    if (!kg.has_entity(r.dst)) throw DanglingReferenceError(r.dst);
    const EntityKind sk = kg.entities_.at(r.src).kind;
    const EntityKind dk = kg.entities_.at(r.dst).kind;
    const auto& sig = relation_signature(r.kind);
    if (std::find(sig.begin(), sig.end(), std::make_pair(sk, dk)) == sig.end()) {
      throw SignatureViolationError(std::string(to_string(r.kind)) + "(" + r.src + " [" +
                                    to_string(sk) + "], " + r.dst + " [" + to_string(dk) + "])");
    }
  };

  std::set<Relation> edges;
  for (const auto& r : spec.relations) {
    check_edge(r);
    edges.insert(r);
  }

  std::set<SecurityRule> rules;
  for (const auto& s : spec.security_rules) {
    if (!kg.has_entity(s.subject)) throw DanglingReferenceError(s.subject);
    const EntityKind want = security_subject_kind(s.predicate);
    const EntityKind got = kg.entities_.at(s.subject).kind;
    if (got != want) {
      throw SignatureViolationError(std::string(to_string(s.predicate)) + " subject " +
                                    s.subject + " must be a " + to_string(want));
    }
    if (s.object) {
      Relation edge{s.subject, security_edge_kind(s.predicate), *s.object};
      check_edge(edge);
      edges.insert(edge);
    } else {
      kg.unconditional_deny_.insert(s.subject);
    }
    rules.insert(s);
  }

  kg.relations_.assign(edges.begin(), edges.end());
  kg.security_rules_.assign(rules.begin(), rules.end());

  for (const auto& r : kg.relations_) {
    kg.adjacency_[{r.src, r.kind}].push_back(r.dst);
    if (r.kind == RelationKind::GuardedBy || r.kind == RelationKind::AuthenticatedBy ||
        r.kind == RelationKind::EncryptedWith) {
      kg.credentials_[r.src].push_back(r.dst);
    }
  }
  // std::set iteration is sorted, so adjacency lists come out sorted too.
  return kg;
}

}  // namespace permkg
