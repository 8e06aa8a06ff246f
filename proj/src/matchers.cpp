#include "weft/matchers.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <tuple>

#include "util.hpp"

namespace weft {
namespace {

constexpr std::array<std::pair<std::string_view, HttpMethod>, 5> kSpringVerbs = {{
    {"GetMapping", HttpMethod::GET},
    {"PostMapping", HttpMethod::POST},
    {"PutMapping", HttpMethod::PUT},
    {"DeleteMapping", HttpMethod::DELETE},
    {"PatchMapping", HttpMethod::PATCH},
}};

constexpr std::array<std::pair<std::string_view, HttpMethod>, 5> kJaxRsVerbs = {{
    {"GET", HttpMethod::GET},
    {"POST", HttpMethod::POST},
    {"PUT", HttpMethod::PUT},
    {"DELETE", HttpMethod::DELETE},
    {"PATCH", HttpMethod::PATCH},
}};

bool is_simple_type(std::string_view type) {
  static const std::set<std::string_view> simple = {
      "String", "int",    "Integer", "long",   "Long",      "short",     "Short",         "byte", "Byte",
      "double", "Double", "float",   "Float",  "boolean",   "Boolean",   "char",          "Character",
      "UUID",   "BigDecimal", "BigInteger", "LocalDate", "LocalDateTime", "Instant"};
  auto dot = type.rfind('.');
  if (dot != std::string_view::npos) type = type.substr(dot + 1);
  return simple.count(type) > 0;
}

bool suffix_matches(std::string_view pattern, std::string_view name) {
  if (pattern.find('*') != std::string_view::npos) return glob_match(pattern, name);
  return name.size() >= pattern.size() && name.substr(name.size() - pattern.size()) == pattern;
}

std::vector<AnnotationUse> annotations_of(const LaastNode& node) {
  std::vector<AnnotationUse> out;
  for (const auto& c : node.children)
    if (c.kind == NodeKind::Annotation && c.name) out.push_back({*c.name, c.attributes});
  return out;
}

const AnnotationUse* find_annotation(const std::vector<AnnotationUse>& anns, std::string_view name) {
  for (const auto& a : anns)
    if (a.name == name) return &a;
  return nullptr;
}

const std::string* argument(const AnnotationUse& a, std::string_view key) {
  for (const auto& [k, v] : a.arguments)
    if (k == key) return &v;
  return nullptr;
}

std::vector<std::string> mapping_paths(const AnnotationUse& a) {
  const std::string* v = argument(a, "value");
  if (!v) v = argument(a, "path");
  if (!v || v->empty()) return {""};
  return util::split(*v, '|');
}

MethodSig method_sig(const LaastNode& m) {
  MethodSig sig;
  sig.name = m.name.value_or("");
  sig.return_type = m.attribute_or("return_type", "");
  sig.annotations = annotations_of(m);
  std::set<std::string> seen;
  for (const auto& c : m.children) {
    if (c.kind != NodeKind::Param || !c.name) continue;
    if (!seen.insert(*c.name).second) continue;
    sig.params.push_back({*c.name, c.attribute_or("declared_type", "")});
  }
  return sig;
}

bool has_modifier(const LaastNode& n, std::string_view mod) {
  const auto* mods = n.attribute("modifiers");
  if (!mods) return false;
  for (const auto& m : util::split(*mods, ' '))
    if (m == mod) return true;
  return false;
}

std::vector<TypedName> fields_of(const LaastNode& type) {
  std::vector<TypedName> out;
  for (const auto& c : type.children)
    if (c.kind == NodeKind::FieldDecl && c.name && !has_modifier(c, "static"))
      out.push_back({*c.name, c.attribute_or("declared_type", "")});
  return out;
}

std::optional<std::string> first_generic_argument(std::string_view type) {
  auto lt = type.find('<');
  if (lt == std::string_view::npos) return std::nullopt;
  int depth = 0;
  for (std::size_t i = lt + 1; i < type.size(); ++i) {
    if (type[i] == '<') ++depth;
    else if ((type[i] == ',' && depth == 0) || (type[i] == '>' && depth-- == 0)) {
      auto arg = util::trim(type.substr(lt + 1, i - lt - 1));
      if (arg.empty()) return std::nullopt;
      return std::string(arg);
    }
  }
  return std::nullopt;
}

std::vector<std::string> path_variables(std::string_view tmpl) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = tmpl.find('{', i)) != std::string_view::npos) {
    auto close = tmpl.find('}', i);
    if (close == std::string_view::npos) break;
    auto var = tmpl.substr(i + 1, close - i - 1);
    auto colon = var.find(':');
    if (colon != std::string_view::npos) var = var.substr(0, colon);
    var = util::trim(var);
    if (!var.empty() && var != "*") out.emplace_back(var);
    i = close + 1;
  }
  return out;
}

struct Context {
  const std::vector<MatcherRule>& rules;
  const std::string& service;
  const ClientIdioms& idioms;
  MatchResult& out;
};

std::optional<ComponentRole> classify(const std::string& name, const std::vector<AnnotationUse>& anns,
                                      const std::vector<MatcherRule>& rules) {
  const MatcherRule* best = nullptr;
  for (const auto& r : rules) {
    bool fires = false;
    for (const auto& a : anns)
      if (std::find(r.annotation_names.begin(), r.annotation_names.end(), a.name) != r.annotation_names.end())
        fires = true;
    if (fires && (!best || r.priority > best->priority)) best = &r;
  }
  if (best) return best->role;
  for (const auto& r : rules) {
    bool fires = false;
    for (const auto& s : r.name_suffixes)
      if (suffix_matches(s, name)) fires = true;
    if (fires && (!best || r.priority > best->priority)) best = &r;
  }
  if (best) return best->role;
  return std::nullopt;
}

void derive_endpoints(const LaastNode& type, const Component& comp, Context& ctx) {
  std::vector<std::string> prefixes{""};
  if (const auto* rm = find_annotation(comp.annotations, "RequestMapping")) prefixes = mapping_paths(*rm);
  else if (const auto* p = find_annotation(comp.annotations, "Path")) prefixes = mapping_paths(*p);

  for (const auto& m : type.children) {
    if (m.kind != NodeKind::MethodDecl || m.attribute("constructor")) continue;
    const auto anns = annotations_of(m);
    std::vector<HttpMethod> methods;
    std::vector<std::string> paths;
    bool jaxrs = false;
    for (auto [name, verb] : kSpringVerbs) {
      if (const auto* a = find_annotation(anns, name)) {
        methods = {verb};
        paths = mapping_paths(*a);
        break;
      }
    }
    if (methods.empty()) {
      if (const auto* rm = find_annotation(anns, "RequestMapping")) {
        paths = mapping_paths(*rm);
        if (const auto* mv = argument(*rm, "method"); mv && !mv->empty()) {
          for (const auto& part : util::split(*mv, '|')) {
            auto parsed = parse_http_method(part);
            if (parsed && *parsed != HttpMethod::UNKNOWN) methods.push_back(*parsed);
            else ctx.out.warnings.push_back({m.span ? m.span->file : "", m.span ? m.span->line_start : 0,
                                             "unknown request method '" + part + "'"});
          }
        }
        if (methods.empty()) methods = {HttpMethod::ANY};
      }
    }
    if (methods.empty()) {
      for (auto [name, verb] : kJaxRsVerbs) {
        if (find_annotation(anns, name)) {
          methods.push_back(verb);
          jaxrs = true;
        }
      }
      if (jaxrs) {
        paths = {""};
        if (const auto* p = find_annotation(anns, "Path")) paths = mapping_paths(*p);
      }
    }
    if (methods.empty()) continue;

    std::vector<std::string> templates;
    for (const auto& pre : prefixes)
      for (const auto& path : paths) {
        auto joined = join_paths(pre, path);
        if (std::find(templates.begin(), templates.end(), joined) == templates.end())
          templates.push_back(std::move(joined));
      }

    std::vector<EndpointParam> params;
    for (const auto& p : m.children) {
      if (p.kind != NodeKind::Param || !p.name) continue;
      const auto panns = annotations_of(p);
      const auto declared = p.attribute_or("declared_type", "");
      auto named = [&](const AnnotationUse& a) {
        if (const auto* v = argument(a, "value"); v && !v->empty()) return *v;
        if (const auto* v = argument(a, "name"); v && !v->empty()) return *v;
        return *p.name;
      };
      if (const auto* a = find_annotation(panns, "PathVariable")) params.push_back({named(*a), ParamKind::Path, declared});
      else if (const auto* a2 = find_annotation(panns, "PathParam")) params.push_back({named(*a2), ParamKind::Path, declared});
      else if (const auto* a3 = find_annotation(panns, "RequestParam")) params.push_back({named(*a3), ParamKind::Query, declared});
      else if (const auto* a4 = find_annotation(panns, "QueryParam")) params.push_back({named(*a4), ParamKind::Query, declared});
      else if (find_annotation(panns, "RequestBody")) params.push_back({*p.name, ParamKind::Body, declared});
      else if (panns.empty()) {
        if (jaxrs) params.push_back({*p.name, ParamKind::Body, declared});
        else if (is_simple_type(declared)) params.push_back({*p.name, ParamKind::Query, declared});
      }
    }

    std::set<std::string> bound;
    for (const auto& p : params)
      if (p.kind == ParamKind::Path) bound.insert(p.name);
    for (const auto& t : templates)
      for (const auto& var : path_variables(t))
        if (!bound.count(var))
          ctx.out.warnings.push_back({m.span ? m.span->file : "", m.span ? m.span->line_start : 0,
                                      "unbound path variable {" + var + "} in " + t});

    for (auto verb : methods) {
      Endpoint ep;
      ep.owner = comp.name;
      ep.http_method = verb;
      ep.url_templates = templates;
      ep.params = params;
      ep.handler = method_sig(m);
      ep.span = m.span;
      ctx.out.endpoints.push_back(std::move(ep));
    }
  }
}

bool is_remote(const LaastNode& call) {
  if (const auto* k = call.attribute("call_kind")) return *k == "remote";
  return call.attribute("url_template") != nullptr;
}

bool is_event(const LaastNode& call) {
  if (const auto* k = call.attribute("call_kind")) return *k == "event";
  return call.attribute("topic") != nullptr && call.attribute("direction") != nullptr;
}

int parse_count(const std::string* text) {
  if (!text) return 0;
  try {
    return std::max(0, std::stoi(*text));
  } catch (const std::exception&) {
    return 0;
  }
}

void collect_calls(const LaastNode& node, const std::string& component, const std::string& method, Context& ctx) {
  for (const auto& c : node.children) {
    if (c.kind == NodeKind::TypeDecl) continue;  // handled by its own visit
    if (c.kind == NodeKind::Call && c.name) {
      if (is_remote(c)) {
        RemoteCall rc;
        rc.caller_service = ctx.service;
        rc.caller_component = component;
        rc.caller_method = method;
        rc.http_method = parse_http_method(c.attribute_or("http_method", "UNKNOWN")).value_or(HttpMethod::UNKNOWN);
        if (rc.http_method == HttpMethod::ANY) rc.http_method = HttpMethod::UNKNOWN;
        rc.url_template = c.attribute_or("url_template", std::string(kWildcard));
        if (rc.url_template.empty()) rc.url_template = std::string(kWildcard);
        rc.arg_count = parse_count(c.attribute("arg_count"));
        rc.span = c.span;
        ctx.out.remote_calls.push_back(std::move(rc));
      } else if (is_event(c)) {
        EventOp ev;
        ev.direction = parse_event_direction(c.attribute_or("direction", "Publish")).value_or(EventDirection::Publish);
        ev.topic = c.attribute_or("topic", std::string(kWildcard));
        if (ev.topic.empty()) ev.topic = std::string(kWildcard);
        ev.component = component;
        ev.span = c.span;
        ctx.out.event_ops.push_back(std::move(ev));
      } else if (!method.empty()) {
        LocalCall lc{component, method, *c.name, std::nullopt, c.span};
        if (const auto* rt = c.attribute("receiver_type")) lc.receiver_type = *rt;
        ctx.out.local_calls.push_back(std::move(lc));
      }
    }
    collect_calls(c, component, c.kind == NodeKind::MethodDecl ? c.name.value_or("") : method, ctx);
  }
}

void visit_type(const LaastNode& type, const std::optional<SourceSpan>& inherited, Context& ctx) {
  const std::string name = type.name.value_or("");
  const auto anns = annotations_of(type);
  auto span = type.span ? type.span : inherited;

  if (!name.empty()) {
    if (auto role = classify(name, anns, ctx.rules)) {
      Component comp;
      comp.role = *role;
      comp.name = name;
      comp.service = ctx.service;
      comp.fields = fields_of(type);
      comp.annotations = anns;
      comp.span = span;
      for (const auto& m : type.children)
        if (m.kind == NodeKind::MethodDecl && m.name && !m.attribute("constructor")) comp.methods.push_back(method_sig(m));
      if (*role == ComponentRole::Repository) {
        for (const auto& c : type.children) {
          if (c.kind != NodeKind::TypeRef || !c.name) continue;
          if (auto arg = first_generic_argument(*c.name)) {
            comp.managed_entity = *arg;
            break;
          }
        }
      }
      if (*role == ComponentRole::Controller) derive_endpoints(type, comp, ctx);
      ctx.out.components.push_back(std::move(comp));
    } else {
      ctx.out.plain_types.push_back({name, fields_of(type), span});
    }
  }

  // listener annotations subscribe methods to topics
  for (const auto& m : type.children) {
    if (m.kind != NodeKind::MethodDecl) continue;
    for (const auto& a : annotations_of(m)) {
      for (const auto& l : ctx.idioms.listeners) {
        if (a.name != l.annotation) continue;
        const std::string* topics = argument(a, l.topic_key);
        if (!topics) topics = argument(a, "value");
        std::vector<std::string> list = topics && !topics->empty() ? util::split(*topics, '|')
                                                                   : std::vector<std::string>{std::string(kWildcard)};
        for (auto& t : list) {
          if (t.empty() || t.find("${") != std::string::npos) t = std::string(kWildcard);
          ctx.out.event_ops.push_back({EventDirection::Subscribe, t, name, m.span});
        }
      }
    }
  }

  collect_calls(type, name, "", ctx);
  for (const auto& c : type.children)
    if (c.kind == NodeKind::TypeDecl) visit_type(c, span, ctx);
}

void visit(const LaastNode& node, const std::optional<SourceSpan>& inherited, Context& ctx) {
  if (node.kind == NodeKind::TypeDecl) {
    visit_type(node, inherited, ctx);
    return;
  }
  const auto& span = node.span ? node.span : inherited;
  for (const auto& c : node.children) visit(c, span, ctx);
}

auto span_key(const std::optional<SourceSpan>& s) {
  return s ? std::make_tuple(1, s->file, s->line_start) : std::make_tuple(0, std::string(), 0);
}

template <typename T>
void sort_by_span(std::vector<T>& items) {
  std::stable_sort(items.begin(), items.end(), [](const T& a, const T& b) { return span_key(a.span) < span_key(b.span); });
}

}  // namespace

std::string_view to_string(ComponentRole role) noexcept {
  switch (role) {
    case ComponentRole::Entity: return "Entity";
    case ComponentRole::Repository: return "Repository";
    case ComponentRole::Service: return "Service";
    case ComponentRole::Controller: return "Controller";
  }
  return "Entity";
}

std::optional<ComponentRole> parse_component_role(std::string_view text) noexcept {
  if (text == "Entity") return ComponentRole::Entity;
  if (text == "Repository") return ComponentRole::Repository;
  if (text == "Service") return ComponentRole::Service;
  if (text == "Controller") return ComponentRole::Controller;
  return std::nullopt;
}

std::string_view to_string(ParamKind kind) noexcept {
  switch (kind) {
    case ParamKind::Path: return "path";
    case ParamKind::Query: return "query";
    case ParamKind::Body: return "body";
  }
  return "query";
}

std::optional<ParamKind> parse_param_kind(std::string_view text) noexcept {
  if (text == "path") return ParamKind::Path;
  if (text == "query") return ParamKind::Query;
  if (text == "body") return ParamKind::Body;
  return std::nullopt;
}

std::string_view to_string(EventDirection direction) noexcept {
  return direction == EventDirection::Publish ? "Publish" : "Subscribe";
}

std::optional<EventDirection> parse_event_direction(std::string_view text) noexcept {
  if (text == "Publish") return EventDirection::Publish;
  if (text == "Subscribe") return EventDirection::Subscribe;
  return std::nullopt;
}

void validate_ruleset(const std::vector<MatcherRule>& rules) {
  std::set<int> priorities;
  for (const auto& r : rules) {
    if (r.annotation_names.empty() && r.name_suffixes.empty())
      throw std::invalid_argument("matcher rule for " + std::string(to_string(r.role)) + " has no trigger");
    if (!priorities.insert(r.priority).second)
      throw std::invalid_argument("duplicate matcher priority " + std::to_string(r.priority));
  }
}

std::vector<MatcherRule> default_ruleset(Convention convention) {
  if (convention == Convention::JaxRsLike) {
    return {
        {ComponentRole::Entity, {"Entity", "Table"}, {}, 10},
        {ComponentRole::Repository, {"Repository"}, {"Repository", "Dao"}, 20},
        {ComponentRole::Service, {"Stateless", "Singleton", "ApplicationScoped", "RequestScoped", "Service"}, {"*Service*"}, 30},
        {ComponentRole::Controller, {"Path"}, {"Resource", "Controller"}, 40},
    };
  }
  return {
      {ComponentRole::Entity, {"Entity", "Document", "Table"}, {}, 10},
      {ComponentRole::Repository, {"Repository"}, {"Repository"}, 20},
      {ComponentRole::Service, {"Service"}, {"*Service*"}, 30},
      {ComponentRole::Controller, {"RestController", "Controller"}, {"Controller"}, 40},
  };
}

std::string join_paths(std::string_view prefix, std::string_view path) {
  std::string joined = std::string(prefix) + "/" + std::string(path);
  std::string out;
  out.reserve(joined.size() + 1);
  out += '/';
  for (char c : joined) {
    if (c == '/' && !out.empty() && out.back() == '/') continue;
    out += c;
  }
  while (out.size() > 1 && out.back() == '/') out.pop_back();
  return out;
}

MatchResult run_matchers(const LaastNode& root, const std::vector<MatcherRule>& ruleset, const std::string& service,
                         const ClientIdioms& idioms) {
  validate_ruleset(ruleset);
  MatchResult out;
  out.service = service;
  Context ctx{ruleset, service, idioms, out};
  visit(root, root.span, ctx);
  sort_by_span(out.components);
  sort_by_span(out.plain_types);
  sort_by_span(out.endpoints);
  sort_by_span(out.remote_calls);
  sort_by_span(out.event_ops);
  sort_by_span(out.local_calls);
  return out;
}

}  // namespace weft
