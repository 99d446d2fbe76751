#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permkg/entities.hpp"
#include "permkg/errors.hpp"
#include "permkg/knowledge_graph.hpp"

namespace permkg {

// The nine permission atoms.
enum class PermissionKind {
  SpaceAccess,
  DeviceUse,
  DeviceControl,
  PortUse,
  PortControl,
  ServiceAccess,
  ServiceControl,
  FileControl,
  InformationKnown,
};

inline constexpr int kPermissionKindCount = 9;

inline const char* to_string(PermissionKind k) {
  switch (k) {
    case PermissionKind::SpaceAccess: return "SpaceAccess";
    case PermissionKind::DeviceUse: return "DeviceUse";
    case PermissionKind::DeviceControl: return "DeviceControl";
    case PermissionKind::PortUse: return "PortUse";
    case PermissionKind::PortControl: return "PortControl";
    case PermissionKind::ServiceAccess: return "ServiceAccess";
    case PermissionKind::ServiceControl: return "ServiceControl";
    case PermissionKind::FileControl: return "FileControl";
    case PermissionKind::InformationKnown: return "InformationKnown";
  }
  return "?";
}

inline std::optional<PermissionKind> permission_kind_from_string(const std::string& s) {
  if (s == "SpaceAccess") return PermissionKind::SpaceAccess;
  if (s == "DeviceUse") return PermissionKind::DeviceUse;
  if (s == "DeviceControl") return PermissionKind::DeviceControl;
  if (s == "PortUse") return PermissionKind::PortUse;
  if (s == "PortControl") return PermissionKind::PortControl;
  if (s == "ServiceAccess") return PermissionKind::ServiceAccess;
  if (s == "ServiceControl") return PermissionKind::ServiceControl;
  if (s == "FileControl") return PermissionKind::FileControl;
  if (s == "InformationKnown") return PermissionKind::InformationKnown;
  return std::nullopt;
}

// Which permission kinds apply to an entity kind. Person entities carry none.
inline const std::vector<PermissionKind>& applicable_permission_kinds(EntityKind k) {
  using P = PermissionKind;
  static const std::vector<PermissionKind> space = {P::SpaceAccess};
  static const std::vector<PermissionKind> device = {P::DeviceUse, P::DeviceControl};
  static const std::vector<PermissionKind> port = {P::PortUse, P::PortControl};
  static const std::vector<PermissionKind> service = {P::ServiceAccess, P::ServiceControl};
  static const std::vector<PermissionKind> file = {P::FileControl};
  static const std::vector<PermissionKind> info = {P::InformationKnown};
  static const std::vector<PermissionKind> none = {};
  switch (k) {
    case EntityKind::Space: return space;
    case EntityKind::Device: return device;
    case EntityKind::Port: return port;
    case EntityKind::Service: return service;
    case EntityKind::File: return file;
    case EntityKind::Information: return info;
    case EntityKind::Person: return none;
  }
  return none;
}

// One (kind, entity) atom. index is its slot in the dense node ordering of a
// particular graph.
struct PermissionNode {
  PermissionKind kind = PermissionKind::SpaceAccess;
  std::string entity;
  int index = -1;

  friend bool operator==(const PermissionNode& a, const PermissionNode& b) {
    return a.kind == b.kind && a.entity == b.entity;
  }
};

// "Kind(entity_id)" literal form used in every file format and on the CLI.
inline std::string format_permission(PermissionKind kind, const std::string& entity) {
  return std::string(to_string(kind)) + "(" + entity + ")";
}

inline std::string format_permission(const PermissionNode& n) {
  return format_permission(n.kind, n.entity);
}

inline std::pair<PermissionKind, std::string> parse_permission_literal(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos || text.empty() || text.back() != ')') {
    throw ParseError(0, "permission literal must look like Kind(entity_id): " + text);
  }
  const std::string kind_str = text.substr(0, open);
  const std::string entity = text.substr(open + 1, text.size() - open - 2);
  auto kind = permission_kind_from_string(kind_str);
  if (!kind) throw ParseError(0, "unknown permission kind: " + kind_str);
  if (entity.empty()) throw ParseError(0, "permission literal has empty entity id: " + text);
  return {*kind, entity};
}

// Fixed-width bit set over a permission universe of size n.
class PermissionSet {
 public:
  PermissionSet() = default;
  explicit PermissionSet(std::size_t universe_size)
      : size_(universe_size), words_((universe_size + 63) / 64, 0) {}

  std::size_t universe_size() const { return size_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  void union_with(const PermissionSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  }

  bool is_subset_of(const PermissionSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~other.words_[i]) return false;
    }
    return true;
  }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  friend bool operator==(const PermissionSet&, const PermissionSet&) = default;

  static PermissionSet intersect(const PermissionSet& a, const PermissionSet& b) {
    PermissionSet out(a.size_);
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] = a.words_[i] & b.words_[i];
    return out;
  }

  static PermissionSet difference(const PermissionSet& a, const PermissionSet& b) {
    PermissionSet out(a.size_);
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] = a.words_[i] & ~b.words_[i];
    return out;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Every legal (permission kind, entity) pair of a graph, ordered by
// (entity id, kind) so indices are stable for a given graph.
inline std::vector<PermissionNode> enumerate_permission_nodes(const KnowledgeGraph& kg) {
  std::vector<PermissionNode> nodes;
  for (const auto& [id, ent] : kg.entities()) {
    for (PermissionKind k : applicable_permission_kinds(ent.kind)) {
      nodes.push_back(PermissionNode{k, id, static_cast<int>(nodes.size())});
    }
  }
  return nodes;
}

}  // namespace permkg
