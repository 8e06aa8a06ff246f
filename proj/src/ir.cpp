#include "weft/ir.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json_codec.hpp"
#include "weft/errors.hpp"

namespace weft {

// ---------------------------------------------------------------------------
// codec

namespace codec {

ObjectReader::ObjectReader(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw SchemaViolation(path_, "expected an object");
}

const ojson* ObjectReader::optional(const std::string& key) {
  seen_.insert(key);
  auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

const ojson& ObjectReader::required(const std::string& key) {
  const auto* v = optional(key);
  if (!v) throw SchemaViolation(path(key), "missing required field");
  return *v;
}

std::string ObjectReader::string(const std::string& key) {
  const auto& v = required(key);
  if (!v.is_string()) throw SchemaViolation(path(key), "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> ObjectReader::optional_string(const std::string& key) {
  const auto* v = optional(key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw SchemaViolation(path(key), "expected a string");
  return v->get<std::string>();
}

long long ObjectReader::integer(const std::string& key) {
  const auto& v = required(key);
  if (!v.is_number_integer()) throw SchemaViolation(path(key), "expected an integer");
  return v.get<long long>();
}

double ObjectReader::number(const std::string& key) {
  const auto& v = required(key);
  if (!v.is_number()) throw SchemaViolation(path(key), "expected a number");
  return v.get<double>();
}

bool ObjectReader::boolean(const std::string& key) {
  const auto& v = required(key);
  if (!v.is_boolean()) throw SchemaViolation(path(key), "expected a boolean");
  return v.get<bool>();
}

const ojson& ObjectReader::array(const std::string& key) {
  static const ojson empty = ojson::array();
  const auto* v = optional(key);
  if (!v) return empty;
  if (!v->is_array()) throw SchemaViolation(path(key), "expected an array");
  return *v;
}

void ObjectReader::finish() const {
  for (const auto& [k, v] : j_.items())
    if (!seen_.count(k)) throw SchemaViolation(path_ + "." + k, "unknown field");
}

ojson span_to_json(const SourceSpan& span) {
  ojson j = ojson::object();
  j["file"] = span.file;
  j["line_start"] = span.line_start;
  j["line_end"] = span.line_end;
  return j;
}

SourceSpan span_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  SourceSpan s;
  s.file = r.string("file");
  s.line_start = static_cast<int>(r.integer("line_start"));
  s.line_end = static_cast<int>(r.integer("line_end"));
  r.finish();
  if (s.file.empty() || s.file.find('\\') != std::string::npos) throw SchemaViolation(path + ".file", "invalid file");
  if (s.line_start < 1 || s.line_end < s.line_start) throw SchemaViolation(path, "invalid line range");
  return s;
}

namespace {

template <typename T, typename F>
void put_list(ojson& j, const char* key, const std::vector<T>& items, F&& fn) {
  if (items.empty()) return;
  ojson arr = ojson::array();
  for (const auto& item : items) arr.push_back(fn(item));
  j[key] = std::move(arr);
}

void put_span(ojson& j, const std::optional<SourceSpan>& span) {
  if (span) j["span"] = span_to_json(*span);
}

std::optional<SourceSpan> read_span(ObjectReader& r, const std::string& path) {
  const auto* s = r.optional("span");
  if (!s) return std::nullopt;
  return span_from_json(*s, path + ".span");
}

ojson typed_name_to_json(const TypedName& t) {
  ojson j = ojson::object();
  j["name"] = t.name;
  j["declared_type"] = t.declared_type;
  return j;
}

TypedName typed_name_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  TypedName t{r.string("name"), r.string("declared_type")};
  r.finish();
  return t;
}

ojson annotation_to_json(const AnnotationUse& a) {
  ojson j = ojson::object();
  j["name"] = a.name;
  if (!a.arguments.empty()) {
    ojson args = ojson::object();
    for (const auto& [k, v] : a.arguments) args[k] = v;
    j["arguments"] = std::move(args);
  }
  return j;
}

AnnotationUse annotation_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  AnnotationUse a;
  a.name = r.string("name");
  if (const auto* args = r.optional("arguments")) {
    if (!args->is_object()) throw SchemaViolation(path + ".arguments", "expected an object");
    for (const auto& [k, v] : args->items()) {
      if (!v.is_string()) throw SchemaViolation(path + ".arguments." + k, "expected a string");
      a.arguments.emplace_back(k, v.get<std::string>());
    }
  }
  r.finish();
  return a;
}

ojson method_sig_to_json(const MethodSig& m) {
  ojson j = ojson::object();
  j["name"] = m.name;
  put_list(j, "params", m.params, typed_name_to_json);
  j["return_type"] = m.return_type;
  put_list(j, "annotations", m.annotations, annotation_to_json);
  return j;
}

template <typename T, typename F>
std::vector<T> read_list(ObjectReader& r, const std::string& key, const std::string& path, F&& fn) {
  std::vector<T> out;
  const auto& arr = r.array(key);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(fn(arr[i], path + "." + key + "[" + std::to_string(i) + "]"));
  return out;
}

MethodSig method_sig_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  MethodSig m;
  m.name = r.string("name");
  m.params = read_list<TypedName>(r, "params", path, typed_name_from_json);
  m.return_type = r.string("return_type");
  m.annotations = read_list<AnnotationUse>(r, "annotations", path, annotation_from_json);
  r.finish();
  return m;
}

template <typename E, typename P>
E read_enum(ObjectReader& r, const std::string& key, P&& parse) {
  const auto text = r.string(key);
  auto v = parse(text);
  if (!v) throw SchemaViolation(r.path(key), "invalid value '" + text + "'");
  return *v;
}

Component component_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  Component c;
  c.role = read_enum<ComponentRole>(r, "role", parse_component_role);
  c.name = r.string("name");
  c.service = r.string("service");
  c.fields = read_list<TypedName>(r, "fields", path, typed_name_from_json);
  c.methods = read_list<MethodSig>(r, "methods", path, method_sig_from_json);
  c.annotations = read_list<AnnotationUse>(r, "annotations", path, annotation_from_json);
  c.managed_entity = r.optional_string("managed_entity");
  c.span = read_span(r, path);
  r.finish();
  return c;
}

ojson plain_type_to_json(const PlainType& p) {
  ojson j = ojson::object();
  j["name"] = p.name;
  put_list(j, "fields", p.fields, typed_name_to_json);
  put_span(j, p.span);
  return j;
}

PlainType plain_type_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  PlainType p;
  p.name = r.string("name");
  p.fields = read_list<TypedName>(r, "fields", path, typed_name_from_json);
  p.span = read_span(r, path);
  r.finish();
  return p;
}

ojson endpoint_param_to_json(const EndpointParam& p) {
  ojson j = ojson::object();
  j["name"] = p.name;
  j["kind"] = std::string(to_string(p.kind));
  j["declared_type"] = p.declared_type;
  return j;
}

EndpointParam endpoint_param_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  EndpointParam p;
  p.name = r.string("name");
  p.kind = read_enum<ParamKind>(r, "kind", parse_param_kind);
  p.declared_type = r.string("declared_type");
  r.finish();
  return p;
}

Endpoint endpoint_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  Endpoint e;
  e.owner = r.string("owner");
  e.http_method = read_enum<HttpMethod>(r, "http_method", parse_http_method);
  const auto& urls = r.array("url_templates");
  for (std::size_t i = 0; i < urls.size(); ++i) {
    if (!urls[i].is_string())
      throw SchemaViolation(path + ".url_templates[" + std::to_string(i) + "]", "expected a string");
    e.url_templates.push_back(urls[i].get<std::string>());
  }
  e.params = read_list<EndpointParam>(r, "params", path, endpoint_param_from_json);
  e.handler = method_sig_from_json(r.required("handler"), path + ".handler");
  e.span = read_span(r, path);
  r.finish();
  return e;
}

RemoteCall remote_call_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  RemoteCall c;
  c.caller_service = r.string("caller_service");
  c.caller_component = r.string("caller_component");
  c.caller_method = r.string("caller_method");
  c.http_method = read_enum<HttpMethod>(r, "http_method", parse_http_method);
  c.url_template = r.string("url_template");
  c.arg_count = static_cast<int>(r.integer("arg_count"));
  c.span = read_span(r, path);
  r.finish();
  return c;
}

EventOp event_op_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  EventOp e;
  e.direction = read_enum<EventDirection>(r, "direction", parse_event_direction);
  e.topic = r.string("topic");
  e.component = r.string("component");
  e.span = read_span(r, path);
  r.finish();
  return e;
}

ojson method_ref_to_json(const MethodRef& m) {
  ojson j = ojson::object();
  j["component"] = m.component;
  j["method"] = m.method;
  return j;
}

MethodRef method_ref_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  MethodRef m{r.string("component"), r.string("method")};
  r.finish();
  return m;
}

ojson report_to_json(const ExtractionReport& rep) {
  ojson j = ojson::object();
  j["files_scanned"] = rep.files_scanned;
  put_list(j, "files_skipped", rep.files_skipped, [](const SkippedFile& s) {
    ojson o = ojson::object();
    o["file"] = s.file;
    o["reason"] = s.reason;
    return o;
  });
  j["nodes_emitted"] = rep.nodes_emitted;
  put_list(j, "warnings", rep.warnings, [](const Warning& w) {
    ojson o = ojson::object();
    o["file"] = w.file;
    o["line"] = w.line;
    o["message"] = w.message;
    return o;
  });
  return j;
}

ExtractionReport report_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  ExtractionReport rep;
  auto scanned = r.integer("files_scanned");
  auto emitted = r.integer("nodes_emitted");
  if (scanned < 0 || emitted < 0) throw SchemaViolation(path, "counts must be non-negative");
  rep.files_scanned = static_cast<std::size_t>(scanned);
  rep.nodes_emitted = static_cast<std::size_t>(emitted);
  rep.files_skipped = read_list<SkippedFile>(r, "files_skipped", path, [](const ojson& o, const std::string& p) {
    ObjectReader rr(o, p);
    SkippedFile s{rr.string("file"), rr.string("reason")};
    rr.finish();
    return s;
  });
  rep.warnings = read_list<Warning>(r, "warnings", path, [](const ojson& o, const std::string& p) {
    ObjectReader rr(o, p);
    Warning w;
    w.file = rr.string("file");
    w.line = static_cast<int>(rr.integer("line"));
    w.message = rr.string("message");
    rr.finish();
    return w;
  });
  r.finish();
  return rep;
}

}  // namespace

ojson component_to_json(const Component& c) {
  ojson j = ojson::object();
  j["role"] = std::string(to_string(c.role));
  j["name"] = c.name;
  j["service"] = c.service;
  put_list(j, "fields", c.fields, typed_name_to_json);
  put_list(j, "methods", c.methods, method_sig_to_json);
  put_list(j, "annotations", c.annotations, annotation_to_json);
  if (c.managed_entity) j["managed_entity"] = *c.managed_entity;
  put_span(j, c.span);
  return j;
}

ojson endpoint_to_json(const Endpoint& e) {
  ojson j = ojson::object();
  j["owner"] = e.owner;
  j["http_method"] = std::string(to_string(e.http_method));
  j["url_templates"] = e.url_templates;
  put_list(j, "params", e.params, endpoint_param_to_json);
  j["handler"] = method_sig_to_json(e.handler);
  put_span(j, e.span);
  return j;
}

ojson remote_call_to_json(const RemoteCall& c) {
  ojson j = ojson::object();
  j["caller_service"] = c.caller_service;
  j["caller_component"] = c.caller_component;
  j["caller_method"] = c.caller_method;
  j["http_method"] = std::string(to_string(c.http_method));
  j["url_template"] = c.url_template;
  j["arg_count"] = c.arg_count;
  put_span(j, c.span);
  return j;
}

ojson event_op_to_json(const EventOp& e) {
  ojson j = ojson::object();
  j["direction"] = std::string(to_string(e.direction));
  j["topic"] = e.topic;
  j["component"] = e.component;
  put_span(j, e.span);
  return j;
}

ojson service_ir_to_json(const ServiceIr& ir) {
  ojson j = ojson::object();
  j["service_name"] = ir.service_name;
  put_list(j, "components", ir.components, component_to_json);
  put_list(j, "plain_types", ir.plain_types, plain_type_to_json);
  put_list(j, "endpoints", ir.endpoints, endpoint_to_json);
  put_list(j, "remote_calls", ir.remote_calls, remote_call_to_json);
  put_list(j, "event_ops", ir.event_ops, event_op_to_json);
  put_list(j, "internal_calls", ir.internal_calls, [](const CallEdge& e) {
    ojson o = ojson::object();
    o["caller"] = method_ref_to_json(e.caller);
    o["callee"] = method_ref_to_json(e.callee);
    return o;
  });
  j["report"] = report_to_json(ir.report);
  return j;
}

ServiceIr service_ir_from_json(const ojson& j, const std::string& path) {
  ObjectReader r(j, path);
  ServiceIr ir;
  ir.service_name = r.string("service_name");
  ir.components = read_list<Component>(r, "components", path, component_from_json);
  ir.plain_types = read_list<PlainType>(r, "plain_types", path, plain_type_from_json);
  ir.endpoints = read_list<Endpoint>(r, "endpoints", path, endpoint_from_json);
  ir.remote_calls = read_list<RemoteCall>(r, "remote_calls", path, remote_call_from_json);
  ir.event_ops = read_list<EventOp>(r, "event_ops", path, event_op_from_json);
  ir.internal_calls = read_list<CallEdge>(r, "internal_calls", path, [](const ojson& o, const std::string& p) {
    ObjectReader rr(o, p);
    CallEdge e{method_ref_from_json(rr.required("caller"), p + ".caller"),
               method_ref_from_json(rr.required("callee"), p + ".callee")};
    rr.finish();
    return e;
  });
  ir.report = report_from_json(r.required("report"), path + ".report");
  r.finish();
  return ir;
}

}  // namespace codec

// ---------------------------------------------------------------------------

namespace {

std::string last_segment(std::string_view type) {
  auto dot = type.rfind('.');
  return std::string(dot == std::string_view::npos ? type : type.substr(dot + 1));
}

std::string strip_spaces(std::string_view text) {
  std::string out;
  for (char c : text)
    if (c != ' ' && c != '\t') out += c;
  return out;
}

}  // namespace

std::string unwrap_collection(std::string_view declared_type) {
  std::string t = strip_spaces(declared_type);
  while (true) {
    if (t.size() > 2 && t.compare(t.size() - 2, 2, "[]") == 0) {
      t.resize(t.size() - 2);
      continue;
    }
    if (t.size() > 3 && t.compare(t.size() - 3, 3, "...") == 0) {
      t.resize(t.size() - 3);
      continue;
    }
    const auto lt = t.find('<');
    if (lt != std::string::npos && t.back() == '>') {
      const auto base = last_segment(std::string_view(t).substr(0, lt));
      if (base == "List" || base == "Set" || base == "Collection" || base == "Optional") {
        std::string inner = t.substr(lt + 1, t.size() - lt - 2);
        for (const char* wildcard : {"?extends", "?super"})
          if (inner.rfind(wildcard, 0) == 0) inner = inner.substr(std::char_traits<char>::length(wildcard));
        t = inner;
        continue;
      }
      return last_segment(std::string_view(t).substr(0, lt)) + t.substr(lt);
    }
    return last_segment(t);
  }
}

ServiceIr build_service_ir(MatchResult matches, ExtractionReport report, std::span<const std::string> taken_names) {
  if (std::find(taken_names.begin(), taken_names.end(), matches.service) != taken_names.end())
    throw DuplicateService(matches.service);

  ServiceIr ir;
  ir.service_name = matches.service;
  ir.components = std::move(matches.components);
  ir.plain_types = std::move(matches.plain_types);
  ir.endpoints = std::move(matches.endpoints);
  ir.remote_calls = std::move(matches.remote_calls);
  ir.event_ops = std::move(matches.event_ops);
  ir.report = std::move(report);
  for (auto& w : matches.warnings) ir.report.warnings.push_back(std::move(w));

  std::map<std::string, std::set<std::string>> owners;  // method name -> components
  std::map<std::string, std::set<std::string>> methods;  // component -> method names
  for (const auto& c : ir.components) {
    methods[c.name];
    for (const auto& m : c.methods) {
      owners[m.name].insert(c.name);
      methods[c.name].insert(m.name);
    }
  }

  std::set<CallEdge> edges;
  for (const auto& call : matches.local_calls) {
    auto caller = methods.find(call.caller_component);
    if (caller == methods.end()) continue;
    auto add = [&](const std::string& target) {
      edges.insert(CallEdge{MethodRef{call.caller_component, call.caller_method}, MethodRef{target, call.callee}});
    };
    if (call.receiver_type) {
      // Calls through a field only resolve when the field's type is a component.
      auto target = methods.find(last_segment(*call.receiver_type));
      if (target != methods.end() && target->second.count(call.callee)) add(target->first);
      continue;
    }
    if (caller->second.count(call.callee)) {
      add(call.caller_component);
      continue;
    }
    auto it = owners.find(call.callee);
    if (it == owners.end()) continue;
    if (it->second.size() == 1) {
      add(*it->second.begin());
    } else {
      std::string names;
      for (const auto& c : it->second) names += (names.empty() ? "" : ", ") + c;
      ir.report.warnings.push_back({call.span ? call.span->file : "", call.span ? call.span->line_start : 0,
                                    "ambiguous call to '" + call.callee + "' (defined in " + names + "); no edge"});
    }
  }
  ir.internal_calls.assign(edges.begin(), edges.end());
  return ir;
}

DataModel derive_data_model(const ServiceIr& ir) {
  DataModel model;
  model.service_name = ir.service_name;
  std::set<std::string> names;
  for (const auto& c : ir.components) {
    if (c.role != ComponentRole::Entity) continue;
    model.entities.push_back(c);
    names.insert(c.name);
  }
  for (const auto& e : model.entities) {
    for (const auto& f : e.fields) {
      const auto target = unwrap_collection(f.declared_type);
      if (target != e.name && names.count(target)) model.relations.push_back({e.name, f.name, target});
    }
  }
  return model;
}

void validate_service_ir(const ServiceIr& ir) {
  if (ir.service_name.empty()) throw SchemaViolation("$.service_name", "must be non-empty");
  std::map<std::string, std::set<std::string>> methods;
  std::set<std::string> types;
  for (std::size_t i = 0; i < ir.components.size(); ++i) {
    const auto& c = ir.components[i];
    const auto path = "$.components[" + std::to_string(i) + "]";
    if (c.name.empty()) throw SchemaViolation(path + ".name", "must be non-empty");
    if (c.service != ir.service_name) throw SchemaViolation(path + ".service", "does not match service_name");
    for (std::size_t m = 0; m < c.methods.size(); ++m) {
      std::set<std::string> params;
      for (const auto& p : c.methods[m].params)
        if (!params.insert(p.name).second)
          throw SchemaViolation(path + ".methods[" + std::to_string(m) + "]", "duplicate parameter '" + p.name + "'");
      methods[c.name].insert(c.methods[m].name);
    }
    types.insert(c.name);
  }
  for (const auto& p : ir.plain_types) types.insert(p.name);
  std::set<std::string> component_names;
  for (const auto& c : ir.components) component_names.insert(c.name);

  for (std::size_t i = 0; i < ir.endpoints.size(); ++i) {
    const auto& e = ir.endpoints[i];
    const auto path = "$.endpoints[" + std::to_string(i) + "]";
    if (!component_names.count(e.owner)) throw SchemaViolation(path + ".owner", "unknown component '" + e.owner + "'");
    if (e.http_method == HttpMethod::UNKNOWN) throw SchemaViolation(path + ".http_method", "UNKNOWN is not an endpoint method");
    if (e.url_templates.empty()) throw SchemaViolation(path + ".url_templates", "must be non-empty");
    for (const auto& t : e.url_templates)
      if (t.empty() || t.front() != '/') throw SchemaViolation(path + ".url_templates", "template must start with '/'");
  }
  for (std::size_t i = 0; i < ir.remote_calls.size(); ++i) {
    const auto& c = ir.remote_calls[i];
    const auto path = "$.remote_calls[" + std::to_string(i) + "]";
    if (c.caller_service != ir.service_name) throw SchemaViolation(path + ".caller_service", "does not match service_name");
    if (!types.count(c.caller_component))
      throw SchemaViolation(path + ".caller_component", "unknown type '" + c.caller_component + "'");
    if (c.url_template.empty()) throw SchemaViolation(path + ".url_template", "must be non-empty");
    if (c.http_method == HttpMethod::ANY) throw SchemaViolation(path + ".http_method", "ANY is not a call method");
    if (c.arg_count < 0) throw SchemaViolation(path + ".arg_count", "must be non-negative");
  }
  for (std::size_t i = 0; i < ir.event_ops.size(); ++i) {
    const auto& e = ir.event_ops[i];
    const auto path = "$.event_ops[" + std::to_string(i) + "]";
    if (e.topic.empty()) throw SchemaViolation(path + ".topic", "must be non-empty");
    if (!types.count(e.component)) throw SchemaViolation(path + ".component", "unknown type '" + e.component + "'");
  }
  for (std::size_t i = 0; i < ir.internal_calls.size(); ++i) {
    const auto path = "$.internal_calls[" + std::to_string(i) + "]";
    for (const auto* ref : {&ir.internal_calls[i].caller, &ir.internal_calls[i].callee}) {
      auto it = methods.find(ref->component);
      if (it == methods.end() || !it->second.count(ref->method))
        throw SchemaViolation(path, "unresolved method " + ref->component + "." + ref->method);
    }
  }
}

std::string save_service_ir(const ServiceIr& ir) { return util::dump_compact(codec::service_ir_to_json(ir)); }

ServiceIr load_service_ir(std::string_view document) {
  util::ojson j;
  try {
    j = util::ojson::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedDocument(std::string("malformed IR document: ") + e.what());
  }
  auto ir = codec::service_ir_from_json(j, "$");
  validate_service_ir(ir);
  return ir;
}

}  // namespace weft
