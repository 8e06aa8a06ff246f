#include "weft/topology.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <yaml-cpp/yaml.h>

#include "util.hpp"
#include "weft/errors.hpp"

namespace weft {

namespace {

constexpr std::string_view kOriginNames[] = {"depends_on", "links", "env_url"};

std::string scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) throw MalformedDocument(where + ": expected a scalar");
  return node.as<std::string>();
}

std::vector<std::string> scalar_list(const YAML::Node& node, const std::string& where) {
  std::vector<std::string> out;
  if (!node || node.IsNull()) return out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar(item, where));
  } else if (node.IsMap()) {
    for (const auto& kv : node) out.push_back(scalar(kv.first, where));
  } else {
    out.push_back(scalar(node, where));
  }
  return out;
}

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

TopologyService parse_service(const std::string& name, const YAML::Node& body, TopologySource& source,
                              std::map<std::string, std::vector<std::string>>& depends,
                              std::map<std::string, std::vector<std::string>>& links) {
  TopologyService svc;
  svc.name = name;
  if (!body || body.IsNull()) return svc;
  if (!body.IsMap()) throw MalformedDocument("services." + name + ": expected a mapping");
  const auto where = "services." + name;
  for (const auto& kv : body) {
    const auto key = scalar(kv.first, where);
    const auto& value = kv.second;
    if (key == "image") {
      svc.image = scalar(value, where + ".image");
    } else if (key == "depends_on") {
      depends[name] = scalar_list(value, where + ".depends_on");
    } else if (key == "links") {
      for (const auto& link : scalar_list(value, where + ".links")) links[name].push_back(link.substr(0, link.find(':')));
    } else if (key == "environment") {
      if (value.IsMap()) {
        for (const auto& e : value)
          svc.env[scalar(e.first, where + ".environment")] = e.second.IsNull() ? "" : scalar(e.second, where + ".environment");
      } else {
        for (const auto& entry : scalar_list(value, where + ".environment")) {
          const auto eq = entry.find('=');
          svc.env[entry.substr(0, eq)] = eq == std::string::npos ? "" : entry.substr(eq + 1);
        }
      }
    } else if (key == "ports") {
      if (value.IsSequence()) {
        for (const auto& p : value) {
          if (p.IsMap()) {
            if (p["published"]) svc.published_ports.push_back(scalar(p["published"], where + ".ports"));
          } else {
            svc.published_ports.push_back(scalar(p, where + ".ports"));
          }
        }
      } else if (!value.IsNull()) {
        throw MalformedDocument(where + ".ports: expected a sequence");
      }
    } else if (key == "networks") {
      if (value.IsMap()) {
        for (const auto& net : value) {
          if (net.second.IsMap() && net.second["aliases"])
            for (const auto& alias : scalar_list(net.second["aliases"], where + ".networks.aliases"))
              svc.aliases.push_back(alias);
        }
      }
    } else {
      source.ignored_keys.push_back(name + "." + key);
    }
  }
  sort_unique(svc.aliases);
  return svc;
}

void finish_model(TopologyModel& model) {
  std::sort(model.services.begin(), model.services.end(),
            [](const TopologyService& a, const TopologyService& b) { return a.name < b.name; });
  std::sort(model.declared_edges.begin(), model.declared_edges.end());
  model.declared_edges.erase(std::unique(model.declared_edges.begin(), model.declared_edges.end()),
                             model.declared_edges.end());
}

}  // namespace

std::string_view to_string(EdgeOrigin origin) noexcept { return kOriginNames[static_cast<int>(origin)]; }

std::optional<EdgeOrigin> parse_edge_origin(std::string_view text) noexcept {
  for (int i = 0; i < 3; ++i)
    if (kOriginNames[i] == text) return static_cast<EdgeOrigin>(i);
  return std::nullopt;
}

TopologyModel parse_compose(std::string_view text, const std::string& source_name) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw MalformedDocument(source_name + ": " + e.what());
  }

  TopologyModel model;
  TopologySource source{source_name, {}};
  if (!doc || doc.IsNull()) {
    model.source_files.push_back(std::move(source));
    return model;
  }
  if (!doc.IsMap()) throw MalformedDocument(source_name + ": top level must be a mapping");

  std::map<std::string, std::vector<std::string>> depends, links;
  try {
    for (const auto& kv : doc) {
      const auto key = scalar(kv.first, source_name);
      if (key == "version") {
        const auto version = scalar(kv.second, "version");
        if (version.empty() || (version[0] != '2' && version[0] != '3'))
          model.warnings.push_back({source_name, 0, "unsupported compose version '" + version + "'; parsing anyway"});
      } else if (key == "services") {
        if (kv.second.IsNull()) continue;
        if (!kv.second.IsMap()) throw MalformedDocument("services: expected a mapping");
        for (const auto& svc : kv.second)
          model.services.push_back(parse_service(scalar(svc.first, "services"), svc.second, source, depends, links));
      } else {
        source.ignored_keys.push_back(key);
      }
    }
  } catch (const YAML::Exception& e) {
    throw MalformedDocument(source_name + ": " + e.what());
  }

  std::map<std::string, std::string> tokens;  // lowercased name or alias -> service
  for (const auto& s : model.services) {
    tokens.emplace(util::to_lower(s.name), s.name);
    for (const auto& a : s.aliases) tokens.emplace(util::to_lower(a), s.name);
  }
  std::set<std::string> names;
  for (const auto& s : model.services) names.insert(s.name);

  auto add_edges = [&](const std::map<std::string, std::vector<std::string>>& targets, EdgeOrigin origin) {
    for (const auto& [from, list] : targets) {
      for (const auto& to : list) {
        if (names.count(to))
          model.declared_edges.push_back({from, to, origin});
        else
          model.warnings.push_back({source_name, 0,
                                    "service '" + from + "' " + std::string(to_string(origin)) + " unknown service '" + to + "'"});
      }
    }
  };
  add_edges(depends, EdgeOrigin::DependsOn);
  add_edges(links, EdgeOrigin::Links);

  static const std::regex url(R"(^\s*https?://([A-Za-z0-9._-]+)(:[0-9]+)?(/.*)?\s*$)", std::regex::icase);
  for (const auto& s : model.services) {
    for (const auto& [key, value] : s.env) {
      std::smatch m;
      if (!std::regex_match(value, m, url)) continue;
      auto it = tokens.find(util::to_lower(m[1].str()));
      if (it != tokens.end() && it->second != s.name) model.declared_edges.push_back({s.name, it->second, EdgeOrigin::EnvUrl});
    }
  }

  sort_unique(source.ignored_keys);
  model.source_files.push_back(std::move(source));
  finish_model(model);
  return model;
}

TopologyModel merge_topologies(std::vector<TopologyModel> models) {
  TopologyModel merged;
  std::set<std::string> seen;
  for (auto& m : models) {
    for (auto& s : m.services) {
      if (!seen.insert(s.name).second) {
        merged.warnings.push_back({m.source_files.empty() ? "" : m.source_files.front().file, 0,
                                   "service '" + s.name + "' already defined; later definition ignored"});
        continue;
      }
      merged.services.push_back(std::move(s));
    }
    for (auto& e : m.declared_edges) merged.declared_edges.push_back(std::move(e));
    for (auto& f : m.source_files) merged.source_files.push_back(std::move(f));
    for (auto& w : m.warnings) merged.warnings.push_back(std::move(w));
  }
  finish_model(merged);
  return merged;
}

std::optional<std::string> HostInventory::resolve(std::string_view host) const {
  auto it = table.find(util::to_lower(host));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> host_variants(std::string_view name) {
  auto lower = util::to_lower(name);
  std::vector<std::string> out{lower};
  auto hyphen = lower, underscore = lower;
  std::replace(hyphen.begin(), hyphen.end(), '_', '-');
  std::replace(underscore.begin(), underscore.end(), '-', '_');
  out.push_back(hyphen);
  out.push_back(underscore);
  sort_unique(out);
  return out;
}

std::map<std::string, std::string> link_topology_services(const TopologyModel& topology, std::span<const ServiceIr> irs) {
  std::vector<std::string> analyzed;
  for (const auto& ir : irs) analyzed.push_back(ir.service_name);
  std::sort(analyzed.begin(), analyzed.end());

  std::map<std::string, std::string> links;
  for (const auto& s : topology.services) {
    std::set<std::string> tokens;
    for (const auto& v : host_variants(s.name)) tokens.insert(v);
    for (const auto& a : s.aliases)
      for (const auto& v : host_variants(a)) tokens.insert(v);
    // An exact name match beats alias and variant matches.
    if (std::binary_search(analyzed.begin(), analyzed.end(), s.name)) {
      links[s.name] = s.name;
      continue;
    }
    for (const auto& name : analyzed) {
      const auto variants = host_variants(name);
      if (std::any_of(variants.begin(), variants.end(), [&](const std::string& v) { return tokens.count(v) > 0; })) {
        links[s.name] = name;
        break;
      }
    }
  }
  return links;
}

HostInventory build_inventory(const TopologyModel& topology, std::span<const ServiceIr> irs) {
  struct Owner {
    std::string name;
    std::string target;
    std::vector<std::string> tokens;
  };
  std::vector<Owner> owners;
  for (const auto& ir : irs) owners.push_back({ir.service_name, ir.service_name, host_variants(ir.service_name)});
  const auto links = link_topology_services(topology, irs);
  for (const auto& s : topology.services) {
    Owner o{s.name, s.name, host_variants(s.name)};
    if (auto it = links.find(s.name); it != links.end()) o.target = it->second;
    for (const auto& a : s.aliases)
      for (const auto& v : host_variants(a)) o.tokens.push_back(v);
    sort_unique(o.tokens);
    owners.push_back(std::move(o));
  }
  std::stable_sort(owners.begin(), owners.end(), [](const Owner& a, const Owner& b) { return a.name < b.name; });

  HostInventory inv;
  std::map<std::string, std::string> first_owner;
  for (const auto& o : owners) {
    for (const auto& t : o.tokens) {
      auto [it, inserted] = inv.table.emplace(t, o.target);
      if (inserted) {
        first_owner[t] = o.name;
      } else if (it->second != o.target) {
        inv.warnings.push_back("host token '" + t + "' claimed by '" + first_owner[t] + "' and '" + o.name + "'; keeping '" +
                               it->second + "'");
      }
    }
  }
  return inv;
}

}  // namespace weft
