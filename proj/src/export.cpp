#include "weft/export.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "json_codec.hpp"
#include "util.hpp"

namespace weft {

namespace {

using util::ojson;

std::string quote(std::string_view id) {
  std::string out = "\"";
  for (char c : id) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string entity_id(const std::string& service, const std::string& entity) { return service + "." + entity; }

struct DotEdge {
  std::string from, to, attrs;
  friend auto operator<=>(const DotEdge&, const DotEdge&) = default;
};

std::set<DotEdge> service_edges(const SystemIr& sys) {
  std::set<DotEdge> edges;
  for (const auto& e : sys.comm_edges) {
    const ServiceIr* to = nullptr;
    for (const auto& s : sys.services)
      if (s.service_name == e.to_service) to = &s;
    const auto method = to ? std::string(to_string(to->endpoints.at(e.endpoint.index).http_method)) : std::string("?");
    std::string attrs = "label=" + quote(method + " " + e.matched_url_template);
    if (e.ambiguous) attrs += ", style=dashed";
    edges.insert({e.from_service, e.to_service, attrs});
  }
  for (const auto& e : sys.event_edges)
    edges.insert({e.publisher, e.subscriber, "label=" + quote(e.topic) + ", style=dotted"});
  for (const auto& e : sys.topology_edges)
    edges.insert({e.from, e.to, "label=" + quote(std::string(to_string(e.origin))) + ", color=gray, fontcolor=gray"});
  return edges;
}

void write_edges(std::ostringstream& os, const std::set<DotEdge>& edges, std::string_view arrow) {
  for (const auto& e : edges) os << "  " << quote(e.from) << ' ' << arrow << ' ' << quote(e.to) << " [" << e.attrs << "];\n";
}

std::set<DotEdge> match_edges(const SystemIr& sys, bool directed) {
  std::set<DotEdge> edges;
  for (const auto& m : sys.context_map.matches) {
    std::string attrs = "label=" + quote(fixed3(m.score));
    if (directed) attrs += ", dir=none, style=dotted, color=blue";
    edges.insert({entity_id(m.entity_a.service, m.entity_a.name), entity_id(m.entity_b.service, m.entity_b.name), attrs});
  }
  return edges;
}

void write_cluster(std::ostringstream& os, const DataModel& ctx, bool with_service_node) {
  os << "  subgraph " << quote("cluster_" + ctx.service_name) << " {\n";
  os << "    label=" << quote(ctx.service_name) << ";\n";
  if (with_service_node) os << "    " << quote(ctx.service_name) << " [shape=box];\n";
  std::set<std::string> names;
  for (const auto& e : ctx.entities) names.insert(e.name);
  for (const auto& n : names)
    os << "    " << quote(entity_id(ctx.service_name, n)) << " [label=" << quote(n) << ", shape=ellipse];\n";
  os << "  }\n";
}

std::string dot_services(const SystemIr& sys) {
  std::ostringstream os;
  os << "digraph services {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& s : sys.services) os << "  " << quote(s.service_name) << ";\n";
  write_edges(os, service_edges(sys), "->");
  os << "}\n";
  return os.str();
}

std::string dot_context(const SystemIr& sys) {
  std::ostringstream os;
  os << "graph context {\n";
  for (const auto& ctx : sys.context_map.bounded_contexts) write_cluster(os, ctx, false);
  write_edges(os, match_edges(sys, false), "--");
  os << "}\n";
  return os.str();
}

std::string dot_full(const SystemIr& sys) {
  std::ostringstream os;
  os << "digraph full {\n  rankdir=LR;\n";
  for (const auto& ctx : sys.context_map.bounded_contexts) write_cluster(os, ctx, true);
  write_edges(os, service_edges(sys), "->");
  write_edges(os, match_edges(sys, true), "->");
  os << "}\n";
  return os.str();
}

ojson subject_to_json(const Subject& s) {
  ojson j = ojson::object();
  j["service"] = s.service;
  j["ref"] = s.ref;
  if (s.span) j["span"] = codec::span_to_json(*s.span);
  return j;
}

std::string report_json(const std::vector<Finding>& findings, const CouplingReport& metrics) {
  ojson root = ojson::object();
  ojson list = ojson::array();
  int counts[3] = {0, 0, 0};
  for (const auto& f : findings) {
    ojson j = ojson::object();
    j["rule_id"] = f.rule_id;
    const auto* info = find_rule(f.rule_id);
    j["name"] = info ? std::string(info->name) : f.rule_id;
    j["severity"] = std::string(to_string(f.severity));
    j["message"] = f.message;
    ojson subjects = ojson::array();
    for (const auto& s : f.subjects) subjects.push_back(subject_to_json(s));
    j["subjects"] = std::move(subjects);
    list.push_back(std::move(j));
    counts[static_cast<int>(f.severity)]++;
  }
  root["findings"] = std::move(list);
  ojson summary = ojson::object();
  summary["errors"] = counts[0];
  summary["warnings"] = counts[1];
  summary["infos"] = counts[2];
  summary["exit_status"] = exit_status(findings);
  root["summary"] = std::move(summary);
  ojson coupling = ojson::object();
  ojson services = ojson::array();
  for (const auto& c : metrics.services) {
    ojson j = ojson::object();
    j["service"] = c.service;
    j["ais"] = c.ais;
    j["ads"] = c.ads;
    j["instability"] = c.instability;
    services.push_back(std::move(j));
  }
  coupling["services"] = std::move(services);
  coupling["dependencies"] = metrics.dependencies;
  coupling["mean_instability"] = metrics.mean_instability;
  root["coupling"] = std::move(coupling);
  return util::dump_pretty(root);
}

std::string report_text(const std::vector<Finding>& findings, const CouplingReport& metrics) {
  std::ostringstream os;
  if (findings.empty()) os << "No findings.\n";
  static constexpr std::pair<Severity, std::string_view> groups[] = {
      {Severity::Error, "Errors"}, {Severity::Warning, "Warnings"}, {Severity::Info, "Info"}};
  bool first = true;
  for (const auto& [severity, title] : groups) {
    std::vector<const Finding*> members;
    for (const auto& f : findings)
      if (f.severity == severity) members.push_back(&f);
    if (members.empty()) continue;
    if (!first) os << '\n';
    first = false;
    os << title << " (" << members.size() << ")\n";
    for (const auto* f : members) {
      std::vector<std::string> services;
      for (const auto& s : f->subjects)
        if (std::find(services.begin(), services.end(), s.service) == services.end()) services.push_back(s.service);
      os << f->rule_id << ' ' << to_string(f->severity) << ' ' << util::join(services, ",") << ": " << f->message;
      for (const auto& s : f->subjects) {
        if (!s.span) continue;
        os << " (" << s.span->file << ':' << s.span->line_start << ')';
        break;
      }
      os << '\n';
    }
  }
  if (!metrics.services.empty()) {
    os << "\nCoupling (ais ads instability)\n";
    for (const auto& c : metrics.services)
      os << "  " << c.service << ' ' << c.ais << ' ' << c.ads << ' ' << fixed3(c.instability) << '\n';
    os << "  dependencies " << metrics.dependencies << ", mean instability " << fixed3(metrics.mean_instability) << '\n';
  }
  return os.str();
}

ojson data_model_to_json(const DataModel& m) {
  ojson j = ojson::object();
  j["service_name"] = m.service_name;
  ojson entities = ojson::array();
  for (const auto& e : m.entities) entities.push_back(codec::component_to_json(e));
  j["entities"] = std::move(entities);
  ojson relations = ojson::array();
  for (const auto& r : m.relations) {
    ojson o = ojson::object();
    o["from"] = r.from;
    o["field"] = r.field;
    o["to"] = r.to;
    relations.push_back(std::move(o));
  }
  j["relations"] = std::move(relations);
  return j;
}

ojson entity_ref_to_json(const EntityRef& r) {
  ojson j = ojson::object();
  j["service"] = r.service;
  j["name"] = r.name;
  return j;
}

ojson context_map_to_json(const ContextMap& map) {
  ojson j = ojson::object();
  ojson contexts = ojson::array();
  for (const auto& m : map.bounded_contexts) contexts.push_back(data_model_to_json(m));
  j["bounded_contexts"] = std::move(contexts);
  ojson matches = ojson::array();
  for (const auto& m : map.matches) {
    ojson o = ojson::object();
    o["entity_a"] = entity_ref_to_json(m.entity_a);
    o["entity_b"] = entity_ref_to_json(m.entity_b);
    o["score"] = m.score;
    o["strategy"] = std::string(to_string(m.strategy));
    ojson fields = ojson::array();
    for (const auto& f : m.field_matches) {
      ojson fo = ojson::object();
      fo["field_a"] = f.field_a;
      fo["field_b"] = f.field_b;
      fo["score"] = f.score;
      fo["type_compatible"] = f.type_compatible;
      fields.push_back(std::move(fo));
    }
    o["field_matches"] = std::move(fields);
    matches.push_back(std::move(o));
  }
  j["matches"] = std::move(matches);
  return j;
}

}  // namespace

std::string_view to_string(DotView view) noexcept {
  switch (view) {
    case DotView::Services: return "services";
    case DotView::Context: return "context";
    case DotView::Full: return "full";
  }
  return "services";
}

std::string export_dot(const SystemIr& sys, DotView view) {
  switch (view) {
    case DotView::Services: return dot_services(sys);
    case DotView::Context: return dot_context(sys);
    case DotView::Full: return dot_full(sys);
  }
  return {};
}

std::string export_report(const std::vector<Finding>& findings, const CouplingReport& metrics, ReportFormat format) {
  return format == ReportFormat::Json ? report_json(findings, metrics) : report_text(findings, metrics);
}

std::string export_context_map_json(const ContextMap& map) { return util::dump_pretty(context_map_to_json(map)); }

std::string export_system_json(const SystemIr& sys) {
  ojson j = ojson::object();
  ojson meta = ojson::object();
  meta["tool_version"] = sys.metadata.tool_version;
  meta["config_digest"] = sys.metadata.config_digest;
  j["metadata"] = std::move(meta);
  ojson services = ojson::array();
  for (const auto& s : sys.services) services.push_back(codec::service_ir_to_json(s));
  j["services"] = std::move(services);
  j["context_map"] = context_map_to_json(sys.context_map);

  ojson comm = ojson::array();
  for (const auto& e : sys.comm_edges) {
    ojson o = ojson::object();
    o["from_service"] = e.from_service;
    o["to_service"] = e.to_service;
    ojson call = ojson::object();
    call["service"] = e.call.service;
    call["index"] = e.call.index;
    call["component"] = e.call.component;
    call["method"] = e.call.method;
    o["call"] = std::move(call);
    ojson ep = ojson::object();
    ep["service"] = e.endpoint.service;
    ep["index"] = e.endpoint.index;
    ep["component"] = e.endpoint.component;
    ep["handler"] = e.endpoint.handler;
    o["endpoint"] = std::move(ep);
    o["matched_url_template"] = e.matched_url_template;
    o["score"] = e.score;
    o["confidence"] = e.confidence;
    o["ambiguous"] = e.ambiguous;
    comm.push_back(std::move(o));
  }
  j["comm_edges"] = std::move(comm);

  ojson events = ojson::array();
  for (const auto& e : sys.event_edges) {
    ojson o = ojson::object();
    o["publisher"] = e.publisher;
    o["subscriber"] = e.subscriber;
    o["topic"] = e.topic;
    events.push_back(std::move(o));
  }
  j["event_edges"] = std::move(events);

  ojson topo = ojson::array();
  for (const auto& e : sys.topology_edges) {
    ojson o = ojson::object();
    o["from"] = e.from;
    o["to"] = e.to;
    o["origin"] = std::string(to_string(e.origin));
    topo.push_back(std::move(o));
  }
  j["topology_edges"] = std::move(topo);
  j["has_topology"] = sys.has_topology;
  ojson inventory = ojson::object();
  for (const auto& [token, service] : sys.inventory.table) inventory[token] = service;
  j["inventory"] = std::move(inventory);

  ojson diags = ojson::array();
  for (const auto& d : sys.diagnostics) {
    ojson o = ojson::object();
    o["severity"] = d.severity;
    if (!d.service.empty()) o["service"] = d.service;
    o["message"] = d.message;
    if (d.span) o["span"] = codec::span_to_json(*d.span);
    diags.push_back(std::move(o));
  }
  j["diagnostics"] = std::move(diags);
  return util::dump_pretty(j);
}

}  // namespace weft
