#include "weft/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <tuple>

#include "util.hpp"

namespace weft {

namespace {

constexpr std::string_view kSeverityNames[] = {"error", "warning", "info"};

std::tuple<std::string, int, int> span_key(const std::optional<SourceSpan>& s) {
  if (!s) return {"", 0, 0};
  return {s->file, s->line_start, s->line_end};
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Subject call_subject(const ServiceIr& svc, const RemoteCall& call) {
  return {svc.service_name, call.caller_component + "." + call.caller_method, call.span};
}

Subject endpoint_subject(const ServiceIr& svc, const Endpoint& ep) {
  return {svc.service_name, ep.owner + "." + ep.handler.name, ep.span};
}

std::string describe_call(const RemoteCall& call) {
  return std::string(to_string(call.http_method)) + " " + call.url_template;
}

std::string describe_endpoint(const Endpoint& ep) {
  return std::string(to_string(ep.http_method)) + " " + util::join(ep.url_templates, ", ");
}

const ServiceIr* find_service(const SystemIr& sys, const std::string& name) {
  for (const auto& s : sys.services)
    if (s.service_name == name) return &s;
  return nullptr;
}

const Component* find_component(const ServiceIr& svc, const std::string& name) {
  for (const auto& c : svc.components)
    if (c.name == name) return &c;
  return nullptr;
}

class Checker {
 public:
  Checker(const SystemIr& sys, const AnalysisConfig& cfg) : sys_(sys), cfg_(cfg) {}

  std::vector<Finding> run() {
    dangling_and_mismatch();
    entity_drift();
    ambiguous_edges();
    unreachable_endpoints();
    topology_mismatch();
    cycles();
    std::sort(out_.begin(), out_.end(), [](const Finding& a, const Finding& b) {
      if (a.rule_id != b.rule_id) return a.rule_id < b.rule_id;
      return std::lexicographical_compare(a.subjects.begin(), a.subjects.end(), b.subjects.begin(), b.subjects.end());
    });
    return std::move(out_);
  }

 private:
  void emit(std::string_view rule, std::string message, std::vector<Subject> subjects) {
    const auto* info = find_rule(rule);
    Severity severity = info->default_severity;
    if (auto it = cfg_.checks.find(std::string(rule)); it != cfg_.checks.end()) {
      if (!it->second.enabled) return;
      if (it->second.severity) severity = *it->second.severity;
    }
    out_.push_back({std::string(rule), severity, std::move(message), std::move(subjects)});
  }

  // Best path-only score among method-incompatible candidates of a call.
  std::pair<double, std::pair<const ServiceIr*, const Endpoint*>> best_blocked_match(const RemoteCall& call) const {
    const auto url = parse_call_url(call.url_template);
    std::optional<std::string> target;
    if (url.host) target = sys_.inventory.resolve(*url.host);
    double best = 0.0;
    std::pair<const ServiceIr*, const Endpoint*> where{nullptr, nullptr};
    for (const auto& svc : sys_.services) {
      if (target && svc.service_name != *target) continue;
      for (const auto& ep : svc.endpoints) {
        if (method_factor(call.http_method, ep.http_method) != 0.0) continue;
        for (const auto& t : ep.url_templates) {
          const double s = path_score(url.segments, path_segments(t));
          if (s > best) {
            best = s;
            where = {&svc, &ep};
          }
        }
      }
    }
    return {best, where};
  }

  void dangling_and_mismatch() {
    std::set<std::pair<std::string, std::size_t>> matched;
    for (const auto& e : sys_.comm_edges) matched.insert({e.call.service, e.call.index});
    for (const auto& svc : sys_.services) {
      for (std::size_t i = 0; i < svc.remote_calls.size(); ++i) {
        const auto& call = svc.remote_calls[i];
        if (matched.count({svc.service_name, i})) continue;
        const auto [score, where] = best_blocked_match(call);
        if (where.second && score >= cfg_.call_threshold - kScoreEpsilon) {
          emit("E02",
               "call " + describe_call(call) + " matches the path of " + where.second->owner + "." +
                   where.second->handler.name + " but that endpoint accepts " +
                   std::string(to_string(where.second->http_method)),
               {call_subject(svc, call), endpoint_subject(*where.first, *where.second)});
        } else {
          emit("E01", "call " + describe_call(call) + " matches no endpoint", {call_subject(svc, call)});
        }
      }
    }
    for (const auto& e : sys_.comm_edges) {
      const auto* from = find_service(sys_, e.from_service);
      const auto* to = find_service(sys_, e.to_service);
      if (!from || !to) continue;
      const auto& call = from->remote_calls.at(e.call.index);
      const auto& ep = to->endpoints.at(e.endpoint.index);
      const auto expected = static_cast<int>(std::count_if(ep.params.begin(), ep.params.end(), [](const EndpointParam& p) {
        return p.kind == ParamKind::Body || p.kind == ParamKind::Path;
      }));
      if (std::abs(call.arg_count - expected) > 1) {
        emit("E02",
             "call " + describe_call(call) + " passes " + std::to_string(call.arg_count) + " argument(s) but " +
                 ep.owner + "." + ep.handler.name + " binds " + std::to_string(expected) + " body/path parameter(s)",
             {call_subject(*from, call), endpoint_subject(*to, ep)});
      }
    }
  }

  void entity_drift() {
    for (const auto& m : sys_.context_map.matches) {
      if (m.score < cfg_.entity_threshold) continue;
      const auto* sa = find_service(sys_, m.entity_a.service);
      const auto* sb = find_service(sys_, m.entity_b.service);
      const Component* ea = sa ? find_component(*sa, m.entity_a.name) : nullptr;
      const Component* eb = sb ? find_component(*sb, m.entity_b.name) : nullptr;
      if (!ea || !eb) continue;
      std::set<std::string> matched_a, matched_b;
      std::vector<std::string> problems;
      for (const auto& fm : m.field_matches) {
        matched_a.insert(fm.field_a);
        matched_b.insert(fm.field_b);
        if (!fm.type_compatible)
          problems.push_back("field " + fm.field_a + "/" + fm.field_b + " has incompatible types");
      }
      for (const auto& f : ea->fields)
        if (!matched_a.count(f.name)) problems.push_back(m.entity_a.service + "." + ea->name + "." + f.name + " has no counterpart");
      for (const auto& f : eb->fields)
        if (!matched_b.count(f.name)) problems.push_back(m.entity_b.service + "." + eb->name + "." + f.name + " has no counterpart");
      if (problems.empty()) continue;
      emit("W01",
           "entity " + m.entity_a.service + "." + ea->name + " ~ " + m.entity_b.service + "." + eb->name + " (score " +
               format_number(m.score) + ") drifts: " + util::join(problems, "; "),
           {{m.entity_a.service, ea->name, ea->span}, {m.entity_b.service, eb->name, eb->span}});
    }
  }

  void ambiguous_edges() {
    std::map<std::pair<std::string, std::size_t>, std::vector<const CommEdge*>> by_call;
    for (const auto& e : sys_.comm_edges)
      if (e.ambiguous) by_call[{e.call.service, e.call.index}].push_back(&e);
    for (const auto& [key, edges] : by_call) {
      const auto* from = find_service(sys_, key.first);
      if (!from) continue;
      const auto& call = from->remote_calls.at(key.second);
      std::vector<Subject> subjects{call_subject(*from, call)};
      std::vector<std::string> targets;
      for (const auto* e : edges) {
        const auto* to = find_service(sys_, e->to_service);
        if (!to) continue;
        const auto& ep = to->endpoints.at(e->endpoint.index);
        subjects.push_back(endpoint_subject(*to, ep));
        targets.push_back(e->to_service + ":" + ep.owner + "." + ep.handler.name);
      }
      emit("W02",
           "call " + describe_call(call) + " matches " + std::to_string(edges.size()) + " endpoints equally (" +
               util::join(targets, ", ") + ")",
           std::move(subjects));
    }
  }

  void unreachable_endpoints() {
    std::set<std::pair<std::string, std::size_t>> reached;
    for (const auto& e : sys_.comm_edges) reached.insert({e.endpoint.service, e.endpoint.index});
    for (const auto& svc : sys_.services)
      for (std::size_t i = 0; i < svc.endpoints.size(); ++i)
        if (!reached.count({svc.service_name, i}))
          emit("W03", "endpoint " + describe_endpoint(svc.endpoints[i]) + " has no inbound call",
               {endpoint_subject(svc, svc.endpoints[i])});
  }

  void topology_mismatch() {
    if (!sys_.has_topology) return;
    std::map<std::pair<std::string, std::string>, std::set<std::string>> declared;
    for (const auto& e : sys_.topology_edges) declared[{e.from, e.to}].insert(std::string(to_string(e.origin)));
    std::set<std::pair<std::string, std::string>> comm, events;
    for (const auto& e : sys_.comm_edges)
      if (e.from_service != e.to_service) comm.insert({e.from_service, e.to_service});
    for (const auto& e : sys_.event_edges) {
      events.insert({e.publisher, e.subscriber});
      events.insert({e.subscriber, e.publisher});
    }
    for (const auto& [pair, origins] : declared) {
      if (comm.count(pair) || events.count(pair)) continue;
      emit("W04",
           "declared dependency " + pair.first + " -> " + pair.second + " (" +
               util::join(std::vector<std::string>(origins.begin(), origins.end()), ", ") +
               ") has no observed communication",
           {{pair.first, pair.first + " -> " + pair.second, std::nullopt}});
    }
    for (const auto& pair : comm) {
      if (declared.count(pair)) continue;
      emit("W04", "observed calls " + pair.first + " -> " + pair.second + " are not declared in the topology",
           {{pair.first, pair.first + " -> " + pair.second, std::nullopt}});
    }
  }

  void cycles() {
    for (const auto& cycle : detect_cycles(comm_graph(sys_))) {
      std::vector<Subject> subjects;
      std::string path;
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        const auto& next = cycle[(i + 1) % cycle.size()];
        subjects.push_back({cycle[i], cycle[i] + " -> " + next, std::nullopt});
        path += cycle[i] + " -> ";
      }
      emit("S01", "cyclic dependency " + path + cycle.front(), std::move(subjects));
    }
  }

  const SystemIr& sys_;
  const AnalysisConfig& cfg_;
  std::vector<Finding> out_;
};

}  // namespace

std::string_view to_string(Severity s) noexcept { return kSeverityNames[static_cast<int>(s)]; }

std::optional<Severity> parse_severity(std::string_view text) noexcept {
  for (int i = 0; i < 3; ++i)
    if (kSeverityNames[i] == text) return static_cast<Severity>(i);
  return std::nullopt;
}

bool operator<(const Subject& a, const Subject& b) {
  return std::tie(a.service, a.ref) < std::tie(b.service, b.ref) ||
         (std::tie(a.service, a.ref) == std::tie(b.service, b.ref) && span_key(a.span) < span_key(b.span));
}

const std::vector<RuleInfo>& rule_catalog() {
  static const std::vector<RuleInfo> catalog{
      {"E01", "DanglingCall", Severity::Error, "remote call matches no endpoint"},
      {"E02", "SignatureMismatch", Severity::Error, "path matches but the HTTP method or argument count does not"},
      {"W01", "EntityDrift", Severity::Warning, "matched entities disagree on fields or field types"},
      {"W02", "AmbiguousEdge", Severity::Warning, "remote call ties between several endpoints"},
      {"W03", "UnreachableEndpoint", Severity::Info, "endpoint with no inbound call"},
      {"W04", "TopologyMismatch", Severity::Warning, "declared and observed dependencies disagree"},
      {"S01", "CyclicDependency", Severity::Warning, "cycle in the service call graph"},
  };
  return catalog;
}

const RuleInfo* find_rule(std::string_view id) {
  for (const auto& r : rule_catalog())
    if (r.id == id) return &r;
  return nullptr;
}

std::vector<Finding> run_checks(const SystemIr& sys, const AnalysisConfig& cfg) { return Checker(sys, cfg).run(); }

ServiceGraph comm_graph(const SystemIr& sys) {
  ServiceGraph g;
  for (const auto& s : sys.services) g[s.service_name];
  for (const auto& e : sys.comm_edges)
    if (e.from_service != e.to_service) g[e.from_service].insert(e.to_service);
  return g;
}

CouplingReport coupling_metrics(const SystemIr& sys) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& e : sys.comm_edges)
    if (e.from_service != e.to_service) pairs.insert({e.from_service, e.to_service});
  for (const auto& e : sys.event_edges)
    if (e.publisher != e.subscriber) pairs.insert({e.publisher, e.subscriber});

  std::map<std::string, ServiceCoupling> per;
  for (const auto& s : sys.services) per[s.service_name].service = s.service_name;
  for (const auto& [from, to] : pairs) {
    per[from].service = from;
    per[to].service = to;
    per[from].ads++;
    per[to].ais++;
  }
  CouplingReport report;
  report.dependencies = static_cast<int>(pairs.size());
  double sum = 0.0;
  for (auto& [name, c] : per) {
    const int total = c.ais + c.ads;
    c.instability = total == 0 ? 0.0 : static_cast<double>(c.ads) / total;
    sum += c.instability;
    report.services.push_back(c);
  }
  if (!report.services.empty()) report.mean_instability = sum / static_cast<double>(report.services.size());
  return report;
}

std::vector<std::vector<std::string>> detect_cycles(const ServiceGraph& graph) {
  std::set<std::string> nodes;
  for (const auto& [from, tos] : graph) {
    nodes.insert(from);
    nodes.insert(tos.begin(), tos.end());
  }
  std::vector<std::vector<std::string>> cycles;
  std::vector<std::string> path;
  std::set<std::string> on_path;
  std::function<void(const std::string&, const std::string&)> dfs = [&](const std::string& start, const std::string& v) {
    auto it = graph.find(v);
    if (it == graph.end()) return;
    for (const auto& w : it->second) {
      if (w == start && path.size() > 1) {
        cycles.push_back(path);
      } else if (w > start && !on_path.count(w)) {
        path.push_back(w);
        on_path.insert(w);
        dfs(start, w);
        on_path.erase(w);
        path.pop_back();
      }
    }
  };
  for (const auto& s : nodes) {
    path = {s};
    on_path = {s};
    dfs(s, s);
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

int exit_status(const std::vector<Finding>& findings) {
  int status = 0;
  for (const auto& f : findings) {
    if (f.severity == Severity::Error) return 2;
    if (f.severity == Severity::Warning) status = 1;
  }
  return status;
}

}  // namespace weft
