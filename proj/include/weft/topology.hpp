#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weft/common.hpp"
#include "weft/ir.hpp"

namespace weft {

struct TopologyService {
  std::string name;
  std::string image;
  std::vector<std::string> aliases;
  std::vector<std::string> published_ports;
  std::map<std::string, std::string> env;
  friend bool operator==(const TopologyService&, const TopologyService&) = default;
};

enum class EdgeOrigin { DependsOn, Links, EnvUrl };
std::string_view to_string(EdgeOrigin origin) noexcept;
std::optional<EdgeOrigin> parse_edge_origin(std::string_view text) noexcept;

struct DeclaredEdge {
  std::string from;
  std::string to;
  EdgeOrigin origin = EdgeOrigin::DependsOn;
  friend bool operator==(const DeclaredEdge&, const DeclaredEdge&) = default;
  friend auto operator<=>(const DeclaredEdge&, const DeclaredEdge&) = default;
};

struct TopologySource {
  std::string file;
  std::vector<std::string> ignored_keys;  // `service.key` or top-level `key`
  friend bool operator==(const TopologySource&, const TopologySource&) = default;
};

struct TopologyModel {
  std::vector<TopologyService> services;  // sorted by name
  std::vector<DeclaredEdge> declared_edges;  // sorted, deduplicated
  std::vector<TopologySource> source_files;
  std::vector<Warning> warnings;
  friend bool operator==(const TopologyModel&, const TopologyModel&) = default;
};

/// Parses the compose subset: `services` with `image`, `depends_on`,
/// `links`, `environment`, `ports` and `networks.*.aliases`.
/// Throws MalformedDocument; an unexpected `version` is only a warning.
TopologyModel parse_compose(std::string_view text, const std::string& source_name = "docker-compose.yml");

/// Later models add services; a service defined twice keeps the first
/// definition and is reported.
TopologyModel merge_topologies(std::vector<TopologyModel> models);

/// Host token -> analyzed service name.
struct HostInventory {
  std::map<std::string, std::string> table;
  std::vector<std::string> warnings;

  std::optional<std::string> resolve(std::string_view host) const;
  friend bool operator==(const HostInventory&, const HostInventory&) = default;
};

/// `name` plus its hyphen/underscore variants, lowercased.
std::vector<std::string> host_variants(std::string_view name);

/// Registers analyzed service names, compose service names and aliases.
/// A compose service whose name, alias or variant equals an analyzed
/// service resolves to it; others resolve to themselves. On collisions the
/// owner that sorts first keeps the token.
HostInventory build_inventory(const TopologyModel& topology, std::span<const ServiceIr> irs);

/// Maps each compose service to the analyzed service it stands for, if any.
std::map<std::string, std::string> link_topology_services(const TopologyModel& topology,
                                                          std::span<const ServiceIr> irs);

}  // namespace weft
