#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "permkg/entities.hpp"
#include "permkg/errors.hpp"
#include "permkg/knowledge_graph.hpp"
#include "permkg/permissions.hpp"
#include "permkg/rng.hpp"
#include "permkg/rules.hpp"
#include "permkg/scenario.hpp"

namespace permkg {

struct GenConfig {
  std::uint64_t seed = 42;
  int n_rooms = 4;
  int n_devices = 8;
  int n_services = 4;
  int n_files = 6;
  int n_info = 6;
  double p_password = 0.5;
  double p_encrypt = 0.5;
  double p_guard = 0.25;  // chance a room checks for a badge at the door
  int n_users = 1000;
  double train_frac = 0.7;

  void validate() const {
    if (n_rooms < 1 || n_devices < 1 || n_services < 1 || n_files < 1 || n_info < 1 ||
        n_users < 1) {
      throw ConfigError("generator sizes must be >= 1");
    }
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p_password) || !prob(p_encrypt) || !prob(p_guard)) {
      throw ConfigError("generator probabilities must lie in [0, 1]");
    }
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
      throw ConfigError("train_frac must lie strictly between 0 and 1");
    }
  }
};

inline GenConfig parse_gen_config(const nlohmann::json& j) {
  GenConfig cfg;
  if (!j.is_object()) throw ConfigError("generator config must be a JSON object");
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
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      throw ConfigError("seed must be an integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.n_rooms = get_int("n_rooms", cfg.n_rooms);
  cfg.n_devices = get_int("n_devices", cfg.n_devices);
  cfg.n_services = get_int("n_services", cfg.n_services);
  cfg.n_files = get_int("n_files", cfg.n_files);
  cfg.n_info = get_int("n_info", cfg.n_info);
  cfg.p_password = get_num("p_password", cfg.p_password);
  cfg.p_encrypt = get_num("p_encrypt", cfg.p_encrypt);
  cfg.p_guard = get_num("p_guard", cfg.p_guard);
  cfg.n_users = get_int("n_users", cfg.n_users);
  cfg.train_frac = get_num("train_frac", cfg.train_frac);
  cfg.validate();
  return cfg;
}

namespace detail {

inline std::string tag(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i + 1);
  return std::string(buf);
}

}  // namespace detail

// Synthetic campus: a connected room graph, devices placed in rooms and
// wired into isolated network segments, services on the server devices of
// their segment, files and information items spread over the services, and
// credential checks (badges, passwords, encryption keys) whose secrets are
// themselves stashed inside services — so some locks can be opened by first
// taking over the right service, and others are dead ends.
inline ScenarioSpec generate_topology(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0x0109));
  ScenarioSpec spec;

  auto add_entity = [&spec](std::string id, EntityKind kind,
                            std::vector<std::pair<std::string, std::string>> attrs) {
    Entity e;
    e.id = std::move(id);
    e.kind = kind;
    for (auto& [k, v] : attrs) e.attrs.emplace(std::move(k), std::move(v));
    spec.entities.push_back(std::move(e));
  };
  auto add_edge = [&spec](const std::string& src, RelationKind kind, const std::string& dst) {
    spec.relations.push_back(Relation{src, kind, dst});
  };

  // Rooms on a random spanning tree plus a few shortcut doorways; doorways
  // are declared in both directions.
  std::vector<std::string> rooms;
  for (int i = 0; i < cfg.n_rooms; ++i) {
    rooms.push_back(detail::tag("room", i));
    add_entity(rooms.back(), EntityKind::Space, {{"description", "room " + std::to_string(i + 1)}});
  }
  for (int i = 1; i < cfg.n_rooms; ++i) {
    const int parent = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(i)));
    add_edge(rooms[static_cast<std::size_t>(parent)], RelationKind::ConnectedTo,
             rooms[static_cast<std::size_t>(i)]);
    add_edge(rooms[static_cast<std::size_t>(i)], RelationKind::ConnectedTo,
             rooms[static_cast<std::size_t>(parent)]);
  }
  for (int k = 0; k < cfg.n_rooms / 3; ++k) {
    const int a = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.n_rooms)));
    const int b = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.n_rooms)));
    if (a == b) continue;
    add_edge(rooms[static_cast<std::size_t>(a)], RelationKind::ConnectedTo,
             rooms[static_cast<std::size_t>(b)]);
    add_edge(rooms[static_cast<std::size_t>(b)], RelationKind::ConnectedTo,
             rooms[static_cast<std::size_t>(a)]);
  }

  // Devices: a few servers, a few terminals, the rest network gear. Every
  // device sits in one room and joins one network segment. Segments are
  // isolated from each other (one spanning tree per segment), so a port
  // only leads to the services of its own segment.
  const int n_segments = std::max(1, std::min(cfg.n_services, cfg.n_devices));
  const int n_servers = std::max(n_segments, cfg.n_devices / 4);
  const int n_terminals = std::max(1, cfg.n_devices / 4);
  std::vector<std::string> devices;
  std::vector<std::string> servers;
  const char* infra_roles[] = {"firewall", "router", "switch"};
  for (int i = 0; i < cfg.n_devices; ++i) {
    std::string role;
    if (i < n_servers) {
      role = "server";
    } else if (i < n_servers + n_terminals) {
      role = "terminal";
    } else {
      role = infra_roles[(i - n_servers - n_terminals) % 3];
    }
    devices.push_back(detail::tag("dev", i));
    if (role == "server") servers.push_back(devices.back());
    add_entity(devices.back(), EntityKind::Device,
               {{"description", role + " " + std::to_string(i + 1)}, {"role", role}});
    const int room = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.n_rooms)));
    add_edge(rooms[static_cast<std::size_t>(room)], RelationKind::Contains,
             devices.back());
  }
  // Device i belongs to segment i % n_segments; wire each segment as its
  // own spanning tree over the segment members.
  const auto segment_of = [n_segments](int i) { return i % n_segments; };
  for (int i = n_segments; i < cfg.n_devices; ++i) {
    const int seg = segment_of(i);
    const int prior = (i - seg) / n_segments;  // same-segment devices before i
    const int peer = seg + n_segments * static_cast<int>(
                               rng.uniform_index(static_cast<std::size_t>(prior)));
    add_edge(devices[static_cast<std::size_t>(peer)], RelationKind::ConnectedTo,
             devices[static_cast<std::size_t>(i)]);
    add_edge(devices[static_cast<std::size_t>(i)], RelationKind::ConnectedTo,
             devices[static_cast<std::size_t>(peer)]);
  }

  // Ports: 1-4 per device.
  std::vector<std::vector<std::string>> device_ports(static_cast<std::size_t>(cfg.n_devices));
  const char* protocols[] = {"tcp", "udp"};
  for (int i = 0; i < cfg.n_devices; ++i) {
    const int n_ports = 1 + static_cast<int>(rng.uniform_index(4));
    for (int p = 0; p < n_ports; ++p) {
      const std::string pid = "port" + std::to_string(p + 1) + "_" + devices[static_cast<std::size_t>(i)];
      device_ports[static_cast<std::size_t>(i)].push_back(pid);
      add_entity(pid, EntityKind::Port,
                 {{"description", "port on " + devices[static_cast<std::size_t>(i)]},
                  {"number", std::to_string(1000 + static_cast<int>(rng.uniform_index(9000)))},
                  {"protocol", protocols[rng.uniform_index(2)]}});
      add_edge(devices[static_cast<std::size_t>(i)], RelationKind::HasPort, pid);
    }
  }

  // Services live on servers of their own segment and are reachable exactly
  // from the ports of that segment, i.e. reachability is induced by device
  // connectivity rather than granted globally.
  std::vector<std::string> services;
  for (int i = 0; i < cfg.n_services; ++i) {
    services.push_back(detail::tag("svc", i));
    add_entity(services.back(), EntityKind::Service,
               {{"description", "service " + std::to_string(i + 1)},
                {"protocol", protocols[rng.uniform_index(2)]}});
    const int seg = segment_of(i);
    std::vector<int> segment_servers;
    for (int d = 0; d < n_servers; ++d) {
      if (segment_of(d) == seg) segment_servers.push_back(d);
    }
    const int host = segment_servers[rng.uniform_index(segment_servers.size())];
    add_edge(devices[static_cast<std::size_t>(host)], RelationKind::Hosts, services.back());
    for (int d = seg; d < cfg.n_devices; d += n_segments) {
      for (const auto& pid : device_ports[static_cast<std::size_t>(d)]) {
        add_edge(services.back(), RelationKind::ReachableFrom, pid);
      }
    }
  }

  // Network gear is usually remote-managed by a service of its own segment;
  // taking that service over therefore hands out the gear and its ports.
  for (int i = n_servers + n_terminals; i < cfg.n_devices; ++i) {
    if (rng.uniform01() < 0.7) {
      const int seg = segment_of(i);
      std::vector<int> segment_services;
      for (int s = 0; s < cfg.n_services; ++s) {
        if (segment_of(s) == seg) segment_services.push_back(s);
      }
      const int svc = segment_services[rng.uniform_index(segment_services.size())];
      add_edge(devices[static_cast<std::size_t>(i)], RelationKind::ManagedBy,
               services[static_cast<std::size_t>(svc)]);
    }
  }

  // Files on random services.
  std::vector<std::string> files;
  for (int i = 0; i < cfg.n_files; ++i) {
    files.push_back(detail::tag("file", i));
    add_entity(files.back(), EntityKind::File,
               {{"description", "file " + std::to_string(i + 1)},
                {"path", "/srv/data/" + files.back()}});
    const int svc = static_cast<int>(rng.uniform_index(services.size()));
    add_edge(services[static_cast<std::size_t>(svc)], RelationKind::StoresFile, files.back());
  }

  // Content information lives inside a random file or service.
  for (int i = 0; i < cfg.n_info; ++i) {
    const std::string iid = detail::tag("info", i);
    add_entity(iid, EntityKind::Information,
               {{"description", "record " + std::to_string(i + 1)}, {"category", "content"}});
    const std::size_t pick = rng.uniform_index(services.size() + files.size());
    if (pick < services.size()) {
      add_edge(services[pick], RelationKind::HoldsInfo, iid);
    } else {
      add_edge(files[pick - services.size()], RelationKind::HoldsInfo, iid);
    }
  }

  // Credentials: secrets that gate rooms, services, and files. Each secret
  // is itself stored in a uniformly chosen service, which is what makes
  // some locks openable in several hops and others unsatisfiable.
  auto stash = [&](const std::string& info_id) {
    const int svc = static_cast<int>(rng.uniform_index(services.size()));
    add_edge(services[static_cast<std::size_t>(svc)], RelationKind::HoldsInfo, info_id);
  };
  for (int i = 0; i < cfg.n_rooms; ++i) {
    if (rng.uniform01() < cfg.p_guard) {
      const std::string iid = "badge_" + rooms[static_cast<std::size_t>(i)];
      add_entity(iid, EntityKind::Information,
                 {{"description", "badge for " + rooms[static_cast<std::size_t>(i)]},
                  {"category", "credential"}});
      spec.security_rules.push_back(
          SecurityRule{rooms[static_cast<std::size_t>(i)],
                       SecurityPredicate::DeniesEntryWithout, iid});
      stash(iid);
    }
  }
  for (int i = 0; i < cfg.n_services; ++i) {
    if (rng.uniform01() < cfg.p_password) {
      const std::string iid = "pw_" + services[static_cast<std::size_t>(i)];
      add_entity(iid, EntityKind::Information,
                 {{"description", "password for " + services[static_cast<std::size_t>(i)]},
                  {"category", "credential"}});
      spec.security_rules.push_back(SecurityRule{services[static_cast<std::size_t>(i)],
                                                 SecurityPredicate::RequiresPassword, iid});
      stash(iid);
    }
  }
  for (int i = 0; i < cfg.n_files; ++i) {
    if (rng.uniform01() < cfg.p_encrypt) {
      const std::string iid = "key_" + files[static_cast<std::size_t>(i)];
      add_entity(iid, EntityKind::Information,
                 {{"description", "key for " + files[static_cast<std::size_t>(i)]},
                  {"category", "credential"}});
      spec.security_rules.push_back(SecurityRule{files[static_cast<std::size_t>(i)],
                                                 SecurityPredicate::RequiresKey, iid});
      stash(iid);
    }
  }

  return spec;
}

struct UserRecord {
  std::string id;
  PermissionSet initial;
  PermissionSet final;
};

struct LabeledDataset {
  std::vector<UserRecord> users;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Samples n_users starting grants (1-5 permissions, biased toward room
// access and known information as the natural entry points), labels each
// with its rule closure, and re-checks every label with the independent
// sweep-based closure before returning.
inline LabeledDataset generate_users(const KnowledgeGraph& kg, const PermissionGraph& pg,
                                     const GenConfig& cfg) {
  cfg.validate();

  std::vector<int> space_nodes;
  std::vector<int> info_nodes;
  for (std::size_t i = 0; i < pg.nodes.size(); ++i) {
    if (pg.nodes[i].kind == PermissionKind::SpaceAccess) {
      space_nodes.push_back(static_cast<int>(i));
    } else if (pg.nodes[i].kind == PermissionKind::InformationKnown) {
      info_nodes.push_back(static_cast<int>(i));
    }
  }
  if (pg.nodes.empty()) {
    throw ConfigError("cannot sample users: the scenario grants no permissions");
  }

  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t seed = cfg.seed + attempt;
    Rng rng(derive_seed(seed, 0x05e5));
    LabeledDataset ds;
    bool nondegenerate = false;

    for (int u = 0; u < cfg.n_users; ++u) {
      UserRecord rec;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "user%04d", u + 1);
      rec.id = buf;
      rec.initial = pg.empty_set();
      const int n_perms = 1 + static_cast<int>(rng.uniform_index(5));
      for (int k = 0; k < n_perms; ++k) {
        const double roll = rng.uniform01();
        int node;
        if (roll < 0.4 && !space_nodes.empty()) {
          node = space_nodes[rng.uniform_index(space_nodes.size())];
        } else if (roll < 0.7 && !info_nodes.empty()) {
          node = info_nodes[rng.uniform_index(info_nodes.size())];
        } else {
          node = static_cast<int>(rng.uniform_index(pg.nodes.size()));
        }
        rec.initial.set(static_cast<std::size_t>(node));
      }
      rec.final = closure(kg, pg, rec.initial);
      if (rec.final != closure_by_sweep(kg, pg, rec.initial)) {
        throw Error("closure label failed independent re-verification");
      }
      if (rec.final != rec.initial) nondegenerate = true;
      ds.users.push_back(std::move(rec));
    }
    if (!nondegenerate) continue;  // all users stuck at their grant: reroll

    std::vector<std::size_t> order(ds.users.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(derive_seed(seed, 0x5917));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[split_rng.uniform_index(i)]);
    }
    const std::size_t n_train =
        static_cast<std::size_t>(cfg.train_frac * static_cast<double>(ds.users.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto& side = i < n_train ? ds.train_ids : ds.test_ids;
      side.push_back(ds.users[order[i]].id);
    }
    std::sort(ds.train_ids.begin(), ds.train_ids.end());
    std::sort(ds.test_ids.begin(), ds.test_ids.end());
    return ds;
  }
  throw Error("could not generate a non-degenerate user population in 100 attempts");
}

}  // namespace permkg
