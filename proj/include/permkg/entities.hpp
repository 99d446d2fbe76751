#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "permkg/errors.hpp"

namespace permkg {

// The seven entity classes spanning the physical, network, information and
// social domains.
enum class EntityKind { Space, Device, Port, Service, File, Information, Person };

inline constexpr int kEntityKindCount = 7;

inline const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::Space: return "Space";
    case EntityKind::Device: return "Device";
    case EntityKind::Port: return "Port";
    case EntityKind::Service: return "Service";
    case EntityKind::File: return "File";
    case EntityKind::Information: return "Information";
    case EntityKind::Person: return "Person";
  }
  return "?";
}

inline std::optional<EntityKind> entity_kind_from_string(const std::string& s) {
  if (s == "Space") return EntityKind::Space;
  if (s == "Device") return EntityKind::Device;
  if (s == "Port") return EntityKind::Port;
  if (s == "Service") return EntityKind::Service;
  if (s == "File") return EntityKind::File;
  if (s == "Information") return EntityKind::Information;
  if (s == "Person") return EntityKind::Person;
  return std::nullopt;
}

enum class RelationKind {
  Contains,
  ConnectedTo,
  HasPort,
  Hosts,
  ReachableFrom,
  StoresFile,
  HoldsInfo,
  ManagedBy,
  Knows,
  GuardedBy,
  EncryptedWith,
  AuthenticatedBy,
};

inline constexpr int kRelationKindCount = 12;

inline const char* to_string(RelationKind k) {
  switch (k) {
    case RelationKind::Contains: return "Contains";
    case RelationKind::ConnectedTo: return "ConnectedTo";
    case RelationKind::HasPort: return "HasPort";
    case RelationKind::Hosts: return "Hosts";
    case RelationKind::ReachableFrom: return "ReachableFrom";
    case RelationKind::StoresFile: return "StoresFile";
    case RelationKind::HoldsInfo: return "HoldsInfo";
    case RelationKind::ManagedBy: return "ManagedBy";
    case RelationKind::Knows: return "Knows";
    case RelationKind::GuardedBy: return "GuardedBy";
    case RelationKind::EncryptedWith: return "EncryptedWith";
    case RelationKind::AuthenticatedBy: return "AuthenticatedBy";
  }
  return "?";
}

inline std::optional<RelationKind> relation_kind_from_string(const std::string& s) {
  if (s == "Contains") return RelationKind::Contains;
  if (s == "ConnectedTo") return RelationKind::ConnectedTo;
  if (s == "HasPort") return RelationKind::HasPort;
  if (s == "Hosts") return RelationKind::Hosts;
  if (s == "ReachableFrom") return RelationKind::ReachableFrom;
  if (s == "StoresFile") return RelationKind::StoresFile;
  if (s == "HoldsInfo") return RelationKind::HoldsInfo;
  if (s == "ManagedBy") return RelationKind::ManagedBy;
  if (s == "Knows") return RelationKind::Knows;
  if (s == "GuardedBy") return RelationKind::GuardedBy;
  if (s == "EncryptedWith") return RelationKind::EncryptedWith;
  if (s == "AuthenticatedBy") return RelationKind::AuthenticatedBy;
  return std::nullopt;
}

// Allowed (source kind, target kind) pairs per relation. An edge outside its
// relation's signature is rejected during graph construction.
inline const std::vector<std::pair<EntityKind, EntityKind>>& relation_signature(RelationKind k) {
  using E = EntityKind;
  static const std::array<std::vector<std::pair<E, E>>, kRelationKindCount> table = {{
      /* Contains        */ {{E::Space, E::Space}, {E::Space, E::Device}},
      /* ConnectedTo     */ {{E::Space, E::Space}, {E::Device, E::Device}},
      /* HasPort         */ {{E::Device, E::Port}},
      /* Hosts           */ {{E::Device, E::Service}},
      /* ReachableFrom   */ {{E::Service, E::Port}},
      /* StoresFile      */ {{E::Service, E::File}},
      /* HoldsInfo       */ {{E::Service, E::Information}, {E::File, E::Information}},
      /* ManagedBy       */ {{E::Device, E::Service}},
      /* Knows           */ {{E::Person, E::Information}},
      /* GuardedBy       */ {{E::Space, E::Information}},
      /* EncryptedWith   */ {{E::File, E::Information}},
      /* AuthenticatedBy */ {{E::Service, E::Information}},
  }};
  return table[static_cast<int>(k)];
}

enum class SecurityPredicate { DeniesEntryWithout, RequiresPassword, RequiresKey };

inline const char* to_string(SecurityPredicate p) {
  switch (p) {
    case SecurityPredicate::DeniesEntryWithout: return "DeniesEntryWithout";
    case SecurityPredicate::RequiresPassword: return "RequiresPassword";
    case SecurityPredicate::RequiresKey: return "RequiresKey";
  }
  return "?";
}

inline std::optional<SecurityPredicate> security_predicate_from_string(const std::string& s) {
  if (s == "DeniesEntryWithout") return SecurityPredicate::DeniesEntryWithout;
  if (s == "RequiresPassword") return SecurityPredicate::RequiresPassword;
  if (s == "RequiresKey") return SecurityPredicate::RequiresKey;
  return std::nullopt;
}

// Subject kind a security predicate applies to, and the relation its
// credential edge materializes as in the graph.
inline EntityKind security_subject_kind(SecurityPredicate p) {
  switch (p) {
    case SecurityPredicate::DeniesEntryWithout: return EntityKind::Space;
    case SecurityPredicate::RequiresPassword: return EntityKind::Service;
    case SecurityPredicate::RequiresKey: return EntityKind::File;
  }
  return EntityKind::Space;
}

inline RelationKind security_edge_kind(SecurityPredicate p) {
  switch (p) {
    case SecurityPredicate::DeniesEntryWithout: return RelationKind::GuardedBy;
    case SecurityPredicate::RequiresPassword: return RelationKind::AuthenticatedBy;
    case SecurityPredicate::RequiresKey: return RelationKind::EncryptedWith;
  }
  return RelationKind::GuardedBy;
}

using AttrMap = std::map<std::string, std::string>;

// Attribute keys accepted per entity kind.
inline const std::vector<std::string>& attr_schema(EntityKind k) {
  static const std::array<std::vector<std::string>, kEntityKindCount> table = {{
      /* Space       */ {"description"},
      /* Device      */ {"description", "role"},
      /* Port        */ {"description", "number", "protocol"},
      /* Service     */ {"description", "protocol"},
      /* File        */ {"description", "path"},
      /* Information */ {"description", "category"},
      /* Person      */ {"description", "role"},
  }};
  return table[static_cast<int>(k)];
}

struct Entity {
  std::string id;
  EntityKind kind = EntityKind::Space;
  AttrMap attrs;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Relation {
  std::string src;
  RelationKind kind = RelationKind::Contains;
  std::string dst;

  friend bool operator==(const Relation&, const Relation&) = default;
  friend auto operator<=>(const Relation& a, const Relation& b) {
    return std::tie(a.src, a.kind, a.dst) <=> std::tie(b.src, b.kind, b.dst);
  }
};

// Declarative security constraint. object is empty when the rule names no
// satisfying credential, in which case the constraint can never be met.
struct SecurityRule {
  std::string subject;
  SecurityPredicate predicate = SecurityPredicate::DeniesEntryWithout;
  std::optional<std::string> object;

  friend bool operator==(const SecurityRule&, const SecurityRule&) = default;
  friend auto operator<=>(const SecurityRule& a, const SecurityRule& b) {
    return std::tie(a.subject, a.predicate, a.object) <=>
           std::tie(b.subject, b.predicate, b.object);
  }
};

}  // namespace permkg
