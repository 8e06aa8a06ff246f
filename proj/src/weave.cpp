#include "weft/weave.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "util.hpp"
#include "weft/errors.hpp"

namespace weft {

namespace {

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> split_identifier(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(util::to_lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (!is_alnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const char p = cur.back();
      const bool next_lower = i + 1 < raw.size() && is_lower(raw[i + 1]);
      if ((is_lower(p) && is_upper(c)) || (is_digit(p) != is_digit(c)) || (is_upper(p) && is_upper(c) && next_lower))
        flush();
    }
    cur += c;
  }
  flush();
  return tokens;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

double taxonomy_score(const std::vector<std::string>& a, const std::vector<std::string>& b, const Taxonomy& t) {
  std::set<std::string> ca, cb;
  for (const auto& x : a)
    if (t.contains(x)) ca.insert(x);
  for (const auto& y : b)
    if (t.contains(y)) cb.insert(y);
  if (ca.empty() || cb.empty()) return 0.0;

  struct Pair {
    double score;
    std::string x, y;
  };
  std::vector<Pair> pairs;
  for (const auto& x : ca)
    for (const auto& y : cb) pairs.push_back({wu_palmer(x, y, t), x, y});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) {
    if (p.score != q.score) return p.score > q.score;
    return std::minmax(p.x, p.y) < std::minmax(q.x, q.y);
  });
  std::set<std::string> used_a, used_b;
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (used_a.count(p.x) || used_b.count(p.y)) continue;
    used_a.insert(p.x);
    used_b.insert(p.y);
    sum += p.score;
  }
  return sum / static_cast<double>(std::max(ca.size(), cb.size()));
}

std::string box_primitive(const std::string& t) {
  static const std::map<std::string, std::string> boxes{
      {"int", "Integer"}, {"long", "Long"},     {"double", "Double"}, {"float", "Float"},
      {"boolean", "Boolean"}, {"char", "Character"}, {"short", "Short"}, {"byte", "Byte"},
  };
  auto it = boxes.find(t);
  return it == boxes.end() ? t : it->second;
}

std::vector<FieldMatch> match_fields(const Component& a, const Component& b, const Taxonomy* taxonomy,
                                     const WeaveConfig& cfg) {
  struct Candidate {
    double score;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    for (std::size_t j = 0; j < b.fields.size(); ++j) {
      const auto s = entity_similarity(a.fields[i].name, b.fields[j].name, taxonomy, cfg).score;
      if (s >= cfg.field_threshold) candidates.push_back({s, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& p, const Candidate& q) {
    if (p.score != q.score) return p.score > q.score;
    const auto& pa = a.fields[p.i].name;
    const auto& qa = a.fields[q.i].name;
    if (pa != qa) return pa < qa;
    return b.fields[p.j].name < b.fields[q.j].name;
  });
  std::vector<bool> used_a(a.fields.size()), used_b(b.fields.size());
  std::vector<std::pair<std::size_t, FieldMatch>> chosen;
  for (const auto& c : candidates) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = true;
    chosen.push_back({c.i, FieldMatch{a.fields[c.i].name, b.fields[c.j].name, c.score,
                                      types_compatible(a.fields[c.i].declared_type, b.fields[c.j].declared_type)}});
  }
  std::sort(chosen.begin(), chosen.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  std::vector<FieldMatch> out;
  for (auto& [i, fm] : chosen) out.push_back(std::move(fm));
  return out;
}

}  // namespace

std::vector<std::string> normalize_entity_name(std::string_view raw, std::span<const std::string> suffix_tokens) {
  auto tokens = split_identifier(raw);
  while (!tokens.empty() &&
         std::find(suffix_tokens.begin(), suffix_tokens.end(), tokens.back()) != suffix_tokens.end())
    tokens.pop_back();
  if (tokens.empty()) return {util::to_lower(raw)};
  return tokens;
}

std::vector<std::string> normalize_entity_name(std::string_view raw) {
  return normalize_entity_name(raw, WeaveConfig{}.suffix_tokens);
}

std::string_view to_string(SimilarityStrategy s) noexcept {
  switch (s) {
    case SimilarityStrategy::Exact: return "exact";
    case SimilarityStrategy::Token: return "token";
    case SimilarityStrategy::Taxonomy: return "taxonomy";
  }
  return "token";
}

Similarity entity_similarity(std::string_view a, std::string_view b, const Taxonomy* taxonomy, const WeaveConfig& cfg) {
  const auto ta = normalize_entity_name(a, cfg.suffix_tokens);
  const auto tb = normalize_entity_name(b, cfg.suffix_tokens);
  if (ta == tb) return {1.0, SimilarityStrategy::Exact};
  Similarity best{jaccard(ta, tb), SimilarityStrategy::Token};
  if (taxonomy) {
    const auto s = taxonomy_score(ta, tb, *taxonomy);
    if (s > best.score) best = {s, SimilarityStrategy::Taxonomy};
  }
  return best;
}

bool types_compatible(std::string_view a, std::string_view b) {
  return box_primitive(unwrap_collection(a)) == box_primitive(unwrap_collection(b));
}

ContextMap build_context_map(std::vector<DataModel> models, const Taxonomy* taxonomy, const WeaveConfig& cfg) {
  std::sort(models.begin(), models.end(),
            [](const DataModel& x, const DataModel& y) { return x.service_name < y.service_name; });
  ContextMap map;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      if (models[i].service_name == models[j].service_name) continue;
      for (const auto& ea : models[i].entities) {
        for (const auto& eb : models[j].entities) {
          const auto sim = entity_similarity(ea.name, eb.name, taxonomy, cfg);
          if (sim.score < cfg.entity_threshold) continue;
          map.matches.push_back({{models[i].service_name, ea.name}, {models[j].service_name, eb.name}, sim.score,
                                 sim.strategy, match_fields(ea, eb, taxonomy, cfg)});
        }
      }
    }
  }
  std::sort(map.matches.begin(), map.matches.end(), [](const EntityMatch& x, const EntityMatch& y) {
    return std::tie(x.entity_a, x.entity_b) < std::tie(y.entity_a, y.entity_b);
  });
  map.bounded_contexts = std::move(models);
  return map;
}

// ---------------------------------------------------------------------------
// endpoint matching

bool is_template_segment(std::string_view segment) noexcept {
  return segment.size() >= 2 && segment.front() == '{' && segment.back() == '}';
}

std::vector<std::string> path_segments(std::string_view path) {
  std::vector<std::string> out;
  for (auto& s : util::split(path, '/'))
    if (!s.empty()) out.push_back(std::move(s));
  return out;
}

CallUrl parse_call_url(std::string_view url) {
  url = util::trim(url);
  if (auto cut = url.find_first_of("?#"); cut != std::string_view::npos) url = url.substr(0, cut);

  CallUrl out;
  const auto scheme = url.find("://");
  const bool has_scheme = scheme != std::string_view::npos && scheme > 0 &&
                          std::all_of(url.begin(), url.begin() + static_cast<std::ptrdiff_t>(scheme), [](char c) {
                            return is_alnum(c) || c == '+' || c == '.' || c == '-';
                          });
  if (has_scheme) {
    auto rest = url.substr(scheme + 3);
    const auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
    if (auto colon = authority.find(':'); colon != std::string_view::npos) authority = authority.substr(0, colon);
    if (!authority.empty() && authority.find('{') == std::string_view::npos) out.host = util::to_lower(authority);
    out.segments = path_segments(slash == std::string_view::npos ? std::string_view{} : rest.substr(slash));
    return out;
  }
  if (url.starts_with(kWildcard)) {
    auto rest = url.substr(kWildcard.size());
    if (rest.empty()) {
      out.segments = {std::string(kWildcard)};
      return out;
    }
    if (rest.front() == '/') {
      out.segments = path_segments(rest);
      return out;
    }
  }
  out.segments = path_segments(url);
  return out;
}

double path_score(std::span<const std::string> call, std::span<const std::string> endpoint) {
  const auto n = std::min(call.size(), endpoint.size());
  const auto m = std::max(call.size(), endpoint.size());
  if (m == 0) return 1.0;
  const auto& longer = call.size() >= endpoint.size() ? call : endpoint;
  for (auto k = n; k < m; ++k)
    if (!is_template_segment(longer[k])) return 0.0;
  double strong = 0, weak = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (is_template_segment(call[k]) || is_template_segment(endpoint[k]))
      weak += 1;
    else if (call[k] == endpoint[k])
      strong += 1;
    else
      return 0.0;
  }
  return (strong + 0.5 * weak) / static_cast<double>(m);
}

double method_factor(HttpMethod call, HttpMethod endpoint) noexcept {
  if (call == HttpMethod::UNKNOWN || endpoint == HttpMethod::ANY) return 0.9;
  return call == endpoint ? 1.0 : 0.0;
}

std::vector<CommEdge> match_call_to_endpoints(const ServiceIr& caller, std::size_t call_index,
                                              std::span<const ServiceIr> services, const HostInventory& inventory,
                                              const WeaveConfig& cfg) {
  const auto& call = caller.remote_calls.at(call_index);
  const auto url = parse_call_url(call.url_template);
  std::optional<std::string> target;
  if (url.host) target = inventory.resolve(*url.host);

  struct Scored {
    double score;
    const ServiceIr* service;
    std::size_t index;
    std::string tmpl;
  };
  std::vector<Scored> scored;
  double best = 0.0;
  for (const auto& svc : services) {
    if (target && svc.service_name != *target) continue;
    for (std::size_t i = 0; i < svc.endpoints.size(); ++i) {
      const auto& ep = svc.endpoints[i];
      const double mf = method_factor(call.http_method, ep.http_method);
      if (mf == 0.0) continue;
      double ep_best = 0.0;
      std::string tmpl;
      for (const auto& t : ep.url_templates) {
        const double s = path_score(url.segments, path_segments(t));
        if (s > ep_best) {
          ep_best = s;
          tmpl = t;
        }
      }
      const double s = ep_best * mf;
      if (s <= 0.0) continue;
      scored.push_back({s, &svc, i, tmpl});
      best = std::max(best, s);
    }
  }

  std::vector<CommEdge> edges;
  if (best <= 0.0 || best < cfg.call_threshold - kScoreEpsilon) return edges;
  for (const auto& s : scored) {
    if (std::abs(s.score - best) > kScoreEpsilon) continue;
    const auto& ep = s.service->endpoints[s.index];
    CommEdge e;
    e.from_service = caller.service_name;
    e.to_service = s.service->service_name;
    e.call = {caller.service_name, call_index, call.caller_component, call.caller_method};
    e.endpoint = {s.service->service_name, s.index, ep.owner, ep.handler.name};
    e.matched_url_template = s.tmpl;
    e.score = s.score;
    edges.push_back(std::move(e));
  }
  const double k = static_cast<double>(edges.size());
  for (auto& e : edges) {
    e.confidence = (1.0 / k) * (target ? 1.0 : 0.5);
    e.ambiguous = edges.size() > 1;
  }
  std::sort(edges.begin(), edges.end(), [](const CommEdge& x, const CommEdge& y) { return x.endpoint < y.endpoint; });
  return edges;
}

// ---------------------------------------------------------------------------

EventMatching match_events(std::span<const ServiceIr> services) {
  struct Op {
    const ServiceIr* service;
    const EventOp* op;
  };
  std::map<std::string, std::vector<Op>> publishers, subscribers;
  EventMatching out;
  for (const auto& svc : services) {
    for (const auto& op : svc.event_ops) {
      if (op.topic == kWildcard) {
        out.diagnostics.push_back({"warning", svc.service_name,
                                   std::string(op.direction == EventDirection::Publish ? "publish" : "subscription") +
                                       " in " + op.component + " has an unresolved topic; not matched",
                                   op.span});
        continue;
      }
      (op.direction == EventDirection::Publish ? publishers : subscribers)[op.topic].push_back({&svc, &op});
    }
  }
  std::set<EventEdge> edges;
  for (const auto& [topic, pubs] : publishers) {
    auto it = subscribers.find(topic);
    if (it == subscribers.end()) {
      for (const auto& p : pubs)
        out.diagnostics.push_back({"info", p.service->service_name,
                                   "topic '" + topic + "' published by " + p.op->component + " has no subscriber",
                                   p.op->span});
      continue;
    }
    for (const auto& p : pubs)
      for (const auto& s : it->second) edges.insert({p.service->service_name, s.service->service_name, topic});
  }
  for (const auto& [topic, subs] : subscribers) {
    if (publishers.count(topic)) continue;
    for (const auto& s : subs)
      out.diagnostics.push_back({"info", s.service->service_name,
                                 "topic '" + topic + "' consumed by " + s.op->component + " has no publisher", s.op->span});
  }
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

std::string config_digest(const WeaveConfig& cfg) {
  util::ojson j = util::ojson::object();
  j["entity_threshold"] = cfg.entity_threshold;
  j["field_threshold"] = cfg.field_threshold;
  j["call_threshold"] = cfg.call_threshold;
  j["suffix_tokens"] = cfg.suffix_tokens;
  return util::hex64(util::fnv1a64(util::dump_compact(j)));
}

SystemIr weave(std::vector<ServiceIr> irs, const Taxonomy* taxonomy, const TopologyModel* topology,
               const WeaveConfig& cfg, unsigned jobs) {
  std::sort(irs.begin(), irs.end(),
            [](const ServiceIr& a, const ServiceIr& b) { return a.service_name < b.service_name; });
  for (std::size_t i = 1; i < irs.size(); ++i)
    if (irs[i].service_name == irs[i - 1].service_name) throw DuplicateService(irs[i].service_name);

  SystemIr sys;
  sys.metadata = {std::string(kToolVersion), config_digest(cfg)};

  std::vector<DataModel> models;
  for (const auto& ir : irs) models.push_back(derive_data_model(ir));
  sys.context_map = build_context_map(std::move(models), taxonomy, cfg);

  const TopologyModel empty;
  const auto& topo = topology ? *topology : empty;
  sys.has_topology = topology != nullptr;
  sys.inventory = build_inventory(topo, irs);
  for (const auto& w : sys.inventory.warnings) sys.diagnostics.push_back({"warning", "", w, std::nullopt});
  for (const auto& w : topo.warnings)
    sys.diagnostics.push_back({"warning", "", w.message, std::nullopt});

  std::vector<std::pair<std::size_t, std::size_t>> calls;
  for (std::size_t s = 0; s < irs.size(); ++s)
    for (std::size_t c = 0; c < irs[s].remote_calls.size(); ++c) calls.emplace_back(s, c);
  std::vector<std::vector<CommEdge>> per_call(calls.size());
  util::parallel_for(calls.size(), jobs, [&](std::size_t k) {
    per_call[k] = match_call_to_endpoints(irs[calls[k].first], calls[k].second, irs, sys.inventory, cfg);
  });
  for (auto& edges : per_call)
    for (auto& e : edges) sys.comm_edges.push_back(std::move(e));

  auto events = match_events(irs);
  sys.event_edges = std::move(events.edges);
  for (auto& d : events.diagnostics) sys.diagnostics.push_back(std::move(d));

  const auto links = link_topology_services(topo, irs);
  std::set<DeclaredEdge> declared;
  for (const auto& e : topo.declared_edges) {
    auto from = links.find(e.from), to = links.find(e.to);
    if (from == links.end() || to == links.end() || from->second == to->second) continue;
    declared.insert({from->second, to->second, e.origin});
  }
  sys.topology_edges.assign(declared.begin(), declared.end());

  sys.services = std::move(irs);
  return sys;
}

}  // namespace weft
