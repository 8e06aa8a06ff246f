#include "generators.hpp"

#include <functional>
#include <set>

namespace weft::testing {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

namespace {

const std::vector<std::string> kPieces{"a", "Z", "0", "_", "-", ".", "/", " ", "\"", "\\", "\n", "\t",
                                       "\x01", "\xc3\xa9", "\xe6\x97\xa5", "\xf0\x9f\x99\x82", "{", "}", "*"};

std::string pick(Rng& rng, const std::vector<std::string>& pool) { return pool[uniform(rng, 0, pool.size() - 1)]; }

std::string nonempty_text(Rng& rng, std::size_t max_len) {
  auto s = random_text(rng, max_len);
  return s.empty() ? "x" : s;
}

SourceSpan random_span(Rng& rng) {
  SourceSpan s;
  s.file = "src/" + std::to_string(uniform(rng, 0, 99)) + (coin(rng) ? "/\xc3\xa9.java" : ".java");
  s.line_start = static_cast<int>(uniform(rng, 1, 500));
  s.line_end = s.line_start + static_cast<int>(uniform(rng, 0, 40));
  return s;
}

std::optional<SourceSpan> maybe_span(Rng& rng) {
  if (coin(rng, 0.7)) return random_span(rng);
  return std::nullopt;
}

Attributes random_attributes(Rng& rng, std::size_t max) {
  Attributes out;
  std::set<std::string> keys;
  const auto n = uniform(rng, 0, max);
  for (std::size_t i = 0; i < n; ++i) {
    auto key = random_text(rng, 6);
    if (!keys.insert(key).second) continue;
    out.emplace_back(std::move(key), random_text(rng, 10));
  }
  return out;
}

TypedName random_typed(Rng& rng, const std::string& name) { return {name, nonempty_text(rng, 8)}; }

std::vector<AnnotationUse> random_annotations(Rng& rng) {
  std::vector<AnnotationUse> out(uniform(rng, 0, 2));
  for (auto& a : out) {
    a.name = nonempty_text(rng, 8);
    a.arguments = random_attributes(rng, 3);
  }
  return out;
}

MethodSig random_method(Rng& rng, std::string name) {
  MethodSig m;
  m.name = std::move(name);
  const auto params = uniform(rng, 0, 3);
  for (std::size_t i = 0; i < params; ++i) m.params.push_back(random_typed(rng, "p" + std::to_string(i)));
  m.return_type = coin(rng) ? random_text(rng, 8) : "";
  m.annotations = random_annotations(rng);
  return m;
}

const HttpMethod kEndpointMethods[] = {HttpMethod::GET, HttpMethod::POST, HttpMethod::PUT,
                                       HttpMethod::DELETE, HttpMethod::PATCH, HttpMethod::ANY};
const HttpMethod kCallMethods[] = {HttpMethod::GET, HttpMethod::POST, HttpMethod::PUT,
                                   HttpMethod::DELETE, HttpMethod::PATCH, HttpMethod::UNKNOWN};

}  // namespace

std::string random_text(Rng& rng, std::size_t max_len) {
  std::string out;
  const auto n = uniform(rng, 0, max_len);
  for (std::size_t i = 0; i < n; ++i) out += pick(rng, kPieces);
  return out;
}

LaastNode random_laast(Rng& rng, int max_depth, std::size_t max_children) {
  std::function<LaastNode(int)> make = [&](int depth) {
    LaastNode n(static_cast<NodeKind>(uniform(rng, 0, 10)));
    if (coin(rng, 0.7)) n.name = random_text(rng, 8);
    n.attributes = random_attributes(rng, 3);
    n.span = maybe_span(rng);
    if (!is_leaf_kind(n.kind) && depth < max_depth) {
      const auto k = uniform(rng, 0, max_children);
      for (std::size_t i = 0; i < k; ++i) n.children.push_back(make(depth + 1));
    }
    return n;
  };
  return make(0);
}

ServiceIr random_service_ir(Rng& rng) {
  ServiceIr ir;
  ir.service_name = nonempty_text(rng, 6);

  std::vector<std::string> types;
  const auto ncomp = uniform(rng, 0, 4);
  for (std::size_t i = 0; i < ncomp; ++i) {
    Component c;
    c.role = static_cast<ComponentRole>(uniform(rng, 0, 3));
    c.name = "C" + std::to_string(i) + random_text(rng, 3);
    c.service = ir.service_name;
    const auto nf = uniform(rng, 0, 3);
    for (std::size_t f = 0; f < nf; ++f) c.fields.push_back(random_typed(rng, nonempty_text(rng, 5)));
    const auto nm = uniform(rng, 0, 3);
    for (std::size_t m = 0; m < nm; ++m) c.methods.push_back(random_method(rng, "m" + std::to_string(uniform(rng, 0, 3))));
    c.annotations = random_annotations(rng);
    if (coin(rng, 0.3)) c.managed_entity = nonempty_text(rng, 5);
    c.span = maybe_span(rng);
    types.push_back(c.name);
    ir.components.push_back(std::move(c));
  }
  const auto nplain = uniform(rng, 0, 2);
  for (std::size_t i = 0; i < nplain; ++i) {
    PlainType p;
    p.name = "P" + std::to_string(i);
    const auto nf = uniform(rng, 0, 2);
    for (std::size_t f = 0; f < nf; ++f) p.fields.push_back(random_typed(rng, nonempty_text(rng, 5)));
    p.span = maybe_span(rng);
    types.push_back(p.name);
    ir.plain_types.push_back(std::move(p));
  }

  if (!ir.components.empty()) {
    const auto ne = uniform(rng, 0, 4);
    for (std::size_t i = 0; i < ne; ++i) {
      Endpoint e;
      e.owner = ir.components[uniform(rng, 0, ir.components.size() - 1)].name;
      e.http_method = kEndpointMethods[uniform(rng, 0, 5)];
      const auto nt = uniform(rng, 1, 3);
      for (std::size_t t = 0; t < nt; ++t) e.url_templates.push_back("/" + random_text(rng, 6));
      const auto np = uniform(rng, 0, 3);
      for (std::size_t p = 0; p < np; ++p)
        e.params.push_back({"q" + std::to_string(p), static_cast<ParamKind>(uniform(rng, 0, 2)), random_text(rng, 6)});
      e.handler = random_method(rng, nonempty_text(rng, 6));
      e.span = maybe_span(rng);
      ir.endpoints.push_back(std::move(e));
    }

    std::vector<MethodRef> refs;
    for (const auto& c : ir.components)
      for (const auto& m : c.methods) refs.push_back({c.name, m.name});
    if (!refs.empty()) {
      const auto nc = uniform(rng, 0, 4);
      for (std::size_t i = 0; i < nc; ++i)
        ir.internal_calls.push_back({refs[uniform(rng, 0, refs.size() - 1)], refs[uniform(rng, 0, refs.size() - 1)]});
    }
  }

  if (!types.empty()) {
    const auto nr = uniform(rng, 0, 4);
    for (std::size_t i = 0; i < nr; ++i) {
      RemoteCall c;
      c.caller_service = ir.service_name;
      c.caller_component = types[uniform(rng, 0, types.size() - 1)];
      c.caller_method = random_text(rng, 6);
      c.http_method = kCallMethods[uniform(rng, 0, 5)];
      c.url_template = nonempty_text(rng, 12);
      c.arg_count = static_cast<int>(uniform(rng, 0, 5));
      c.span = maybe_span(rng);
      ir.remote_calls.push_back(std::move(c));
    }
    const auto nv = uniform(rng, 0, 3);
    for (std::size_t i = 0; i < nv; ++i) {
      EventOp op;
      op.direction = coin(rng) ? EventDirection::Publish : EventDirection::Subscribe;
      op.topic = nonempty_text(rng, 8);
      op.component = types[uniform(rng, 0, types.size() - 1)];
      op.span = maybe_span(rng);
      ir.event_ops.push_back(std::move(op));
    }
  }

  ir.report.files_scanned = uniform(rng, 0, 1000);
  const auto ns = uniform(rng, 0, 2);
  for (std::size_t i = 0; i < ns; ++i) ir.report.files_skipped.push_back({nonempty_text(rng, 8), random_text(rng, 10)});
  ir.report.nodes_emitted = uniform(rng, 0, 100000);
  const auto nw = uniform(rng, 0, 2);
  for (std::size_t i = 0; i < nw; ++i)
    ir.report.warnings.push_back({random_text(rng, 8), static_cast<int>(uniform(rng, 0, 300)), random_text(rng, 12)});
  return ir;
}

RandomTaxonomy random_taxonomy(Rng& rng, std::size_t max_nodes) {
  RandomTaxonomy t;
  const auto n = uniform(rng, 1, max_nodes);
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.terms.push_back("t" + std::to_string(i));
    t.parent.push_back(i == 0 ? -1 : static_cast<int>(uniform(rng, 0, i - 1)));
    if (i > 0) kids[static_cast<std::size_t>(t.parent[i])].push_back(i);
  }
  std::function<void(std::size_t, std::size_t)> render = [&](std::size_t node, std::size_t level) {
    t.text += std::string(2 * level, ' ') + t.terms[node] + "\n";
    for (auto k : kids[node]) render(k, level + 1);
  };
  render(0, 0);
  return t;
}

namespace {

const std::vector<std::string> kLiterals{"a", "b", "c"};
const std::vector<std::string> kEndpointVars{"{id}", "{x}"};

std::string render_path(const std::vector<std::string>& segments) {
  std::string out;
  for (const auto& s : segments) out += "/" + s;
  return out;
}

}  // namespace

MatchInstance random_match_instance(Rng& rng, std::size_t max_calls, std::size_t max_endpoints,
                                    std::size_t max_templates) {
  static const std::vector<std::string> kNames{"alpha", "beta", "gamma"};
  MatchInstance inst;
  const auto nsvc = uniform(rng, 2, kNames.size());
  for (std::size_t i = 0; i < nsvc; ++i) {
    ServiceIr ir;
    ir.service_name = kNames[i];
    Component c;
    c.role = ComponentRole::Controller;
    c.name = "Api";
    c.service = ir.service_name;
    ir.components.push_back(c);
    inst.services.push_back(std::move(ir));

    TopologyService ts;
    ts.name = kNames[i];
    ts.aliases = {kNames[i] + "-api"};
    inst.topology.services.push_back(std::move(ts));
  }
  inst.caller = uniform(rng, 0, nsvc - 1);

  const auto ne = uniform(rng, 0, max_endpoints);
  for (std::size_t i = 0; i < ne; ++i) {
    auto& svc = inst.services[uniform(rng, 0, nsvc - 1)];
    OracleEndpoint oe;
    oe.service = svc.service_name;
    oe.index = svc.endpoints.size();
    oe.method = kEndpointMethods[uniform(rng, 0, 5)];
    const auto nt = uniform(rng, 1, max_templates);
    Endpoint e;
    e.owner = "Api";
    e.http_method = oe.method;
    e.handler.name = "h" + std::to_string(i);
    for (std::size_t t = 0; t < nt; ++t) {
      std::vector<std::string> segs(uniform(rng, 0, 4));
      for (auto& s : segs) s = coin(rng, 0.3) ? pick(rng, kEndpointVars) : pick(rng, kLiterals);
      const auto text = segs.empty() ? std::string("/") : render_path(segs);
      e.url_templates.push_back(text);
      oe.templates.push_back(segs);
      oe.rendered.push_back(text);
    }
    svc.endpoints.push_back(std::move(e));
    inst.endpoints.push_back(std::move(oe));
  }

  auto& caller = inst.services[inst.caller];
  const auto nc = uniform(rng, 0, max_calls);
  for (std::size_t i = 0; i < nc; ++i) {
    OracleCall oc;
    oc.method = kCallMethods[uniform(rng, 0, 5)];
    oc.segments.resize(uniform(rng, 0, 4));
    for (auto& s : oc.segments) s = coin(rng, 0.3) ? std::string(kWildcard) : pick(rng, kLiterals);

    const auto& target = kNames[uniform(rng, 0, nsvc - 1)];
    std::string url;
    switch (uniform(rng, 0, 6)) {
      case 0: url = "http://" + target; oc.target = target; break;
      case 1: url = "http://" + target + "-api:8080"; oc.target = target; break;
      case 2: url = "https://" + target + "_api"; oc.target = target; break;
      case 3: {
        std::string upper = target;
        for (auto& ch : upper) ch = static_cast<char>(ch - 'a' + 'A');
        url = "http://" + upper;
        oc.target = target;
        break;
      }
      case 4: url = "http://ghost"; break;
      case 5: break;
      default: url = oc.segments.empty() ? "" : std::string(kWildcard); break;
    }
    url += oc.segments.empty() && url.empty() ? std::string("/") : render_path(oc.segments);

    RemoteCall rc;
    rc.caller_service = caller.service_name;
    rc.caller_component = "Api";
    rc.caller_method = "c" + std::to_string(i);
    rc.http_method = oc.method;
    rc.url_template = url;
    caller.remote_calls.push_back(std::move(rc));
    inst.calls.push_back(std::move(oc));
  }
  return inst;
}

}  // namespace weft::testing
