#include "weft/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <thread>

#include "json_codec.hpp"
#include "util.hpp"
#include "weft/errors.hpp"
#include "weft/export.hpp"
#include "weft/ir.hpp"
#include "weft/topology.hpp"

namespace weft {

namespace fs = std::filesystem;

namespace {

using codec::ObjectReader;
using util::ojson;

std::string field_of(const std::string& path) { return path.rfind("$.", 0) == 0 ? path.substr(2) : path; }

std::vector<std::string> string_list(const ojson& arr, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) throw SchemaViolation(path + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

Convention read_convention(ObjectReader& r, const std::string& key, Convention fallback) {
  auto text = r.optional_string(key);
  if (!text) return fallback;
  auto c = parse_convention(*text);
  if (!c) throw SchemaViolation(r.path(key), "unknown convention '" + *text + "'");
  return *c;
}

double read_threshold(ObjectReader& r, const std::string& key, double fallback) {
  if (!r.optional(key)) return fallback;
  const double v = r.number(key);
  if (v < 0.0 || v > 1.0) throw SchemaViolation(r.path(key), "must be within [0, 1]");
  return v;
}

void read_idioms(const ojson& j, ClientIdioms& idioms) {
  ObjectReader r(j, "$.idioms");
  auto append = [&](const std::string& key, std::vector<std::string>& into) {
    for (auto& s : string_list(r.array(key), r.path(key))) into.push_back(std::move(s));
  };
  append("rest_template", idioms.rest_template_receivers);
  append("web_client", idioms.web_client_receivers);
  append("jaxrs_client", idioms.jaxrs_client_receivers);
  const auto& pubs = r.array("publishers");
  for (std::size_t i = 0; i < pubs.size(); ++i) {
    ObjectReader p(pubs[i], "$.idioms.publishers[" + std::to_string(i) + "]");
    ClientIdioms::Publisher pub{p.string("receiver"), p.string("method"), 0};
    if (p.optional("topic_arg")) pub.topic_arg = static_cast<int>(p.integer("topic_arg"));
    p.finish();
    idioms.publishers.push_back(std::move(pub));
  }
  const auto& lis = r.array("listeners");
  for (std::size_t i = 0; i < lis.size(); ++i) {
    ObjectReader l(lis[i], "$.idioms.listeners[" + std::to_string(i) + "]");
    idioms.listeners.push_back({l.string("annotation"), l.string("topic_key")});
    l.finish();
  }
  r.finish();
}

RunConfig parse_config_json(const ojson& j, const fs::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  ObjectReader r(j, "$");
  auto resolve = [&](const std::string& p) { return (base_dir / p).lexically_normal(); };

  const auto& services = r.required("services");
  if (services.is_string()) {
    if (services.get<std::string>() != "auto") throw SchemaViolation("$.services", "expected \"auto\" or a list");
    cfg.auto_discover = true;
    cfg.services_root = resolve(r.string("services_root"));
    cfg.auto_convention = read_convention(r, "convention", Convention::SpringLike);
  } else if (services.is_array()) {
    for (std::size_t i = 0; i < services.size(); ++i) {
      const auto field = "services[" + std::to_string(i) + "]";
      ObjectReader s(services[i], "$." + field);
      ServiceEntry entry;
      entry.field = field;
      entry.tree.service_name = s.string("name");
      if (entry.tree.service_name.empty()) throw SchemaViolation(s.path("name"), "must be non-empty");
      entry.tree.root_dir = resolve(s.string("root_dir"));
      entry.tree.include_globs = string_list(s.array("include_globs"), s.path("include_globs"));
      entry.tree.convention = read_convention(s, "convention", Convention::SpringLike);
      s.finish();
      for (const auto& prev : cfg.services)
        if (prev.tree.service_name == entry.tree.service_name)
          throw SchemaViolation("$." + field + ".name", "duplicate service name '" + entry.tree.service_name + "'");
      cfg.services.push_back(std::move(entry));
    }
    if (r.optional("services_root") || r.optional("convention"))
      throw SchemaViolation("$.services_root", "only valid with \"services\": \"auto\"");
  } else {
    throw SchemaViolation("$.services", "expected \"auto\" or a list");
  }

  if (auto t = r.optional_string("taxonomy_path")) cfg.taxonomy_path = resolve(*t);
  for (const auto& p : string_list(r.array("compose_paths"), "$.compose_paths")) cfg.compose_paths.push_back(resolve(p));

  if (const auto* th = r.optional("thresholds")) {
    ObjectReader t(*th, "$.thresholds");
    cfg.weave.entity_threshold = read_threshold(t, "entity", cfg.weave.entity_threshold);
    cfg.weave.field_threshold = read_threshold(t, "field", cfg.weave.field_threshold);
    cfg.weave.call_threshold = read_threshold(t, "call", cfg.weave.call_threshold);
    t.finish();
  }
  if (r.optional("suffix_tokens")) {
    cfg.weave.suffix_tokens = string_list(r.array("suffix_tokens"), "$.suffix_tokens");
    for (auto& s : cfg.weave.suffix_tokens) s = util::to_lower(s);
  }

  if (const auto* rules = r.optional("rules")) {
    if (!rules->is_object()) throw SchemaViolation("$.rules", "expected an object");
    for (const auto& [role_name, body] : rules->items()) {
      const auto path = "$.rules." + role_name;
      auto role = parse_component_role(role_name);
      if (!role) throw SchemaViolation(path, "unknown role");
      ObjectReader o(body, path);
      RuleOverride ov{string_list(o.array("annotations"), o.path("annotations")),
                      string_list(o.array("suffixes"), o.path("suffixes"))};
      o.finish();
      cfg.rules[*role] = std::move(ov);
    }
  }

  if (const auto* checks = r.optional("checks")) {
    if (!checks->is_object()) throw SchemaViolation("$.checks", "expected an object");
    for (const auto& [id, body] : checks->items()) {
      const auto path = "$.checks." + id;
      if (!find_rule(id)) throw SchemaViolation(path, "unknown rule");
      ObjectReader o(body, path);
      CheckOverride ov;
      if (o.optional("enabled")) ov.enabled = o.boolean("enabled");
      if (auto sev = o.optional_string("severity")) {
        ov.severity = parse_severity(*sev);
        if (!ov.severity) throw SchemaViolation(o.path("severity"), "expected error, warning or info");
      }
      o.finish();
      cfg.checks[id] = ov;
    }
  }

  if (const auto* idioms = r.optional("idioms")) read_idioms(*idioms, cfg.idioms);
  cfg.output_dir = resolve(r.optional_string("output_dir").value_or("weft-out"));
  r.finish();
  return cfg;
}

bool has_source_files(const fs::path& dir, const std::vector<std::string>& globs) {
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (!it->is_regular_file(ec)) continue;
    const auto rel = fs::relative(it->path(), dir, ec).generic_string();
    for (const auto& g : globs)
      if (glob_match(g, rel)) return true;
  }
  return false;
}

void log_line(const RunOptions& options, const std::string& message) {
  if (options.log) options.log(message);
}

}  // namespace

RunConfig parse_run_config(std::string_view json, const fs::path& base_dir) {
  ojson j;
  try {
    j = ojson::parse(json.begin(), json.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_config_json(j, base_dir);
  } catch (const SchemaViolation& e) {
    const std::string what = e.what();
    const auto prefix = e.path() + ": ";
    throw ConfigError(field_of(e.path()), what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
  }
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = util::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError("config", e.what());
  }
  return parse_run_config(text, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::vector<MatcherRule> effective_ruleset(const RunConfig& cfg, Convention convention) {
  auto rules = default_ruleset(convention);
  for (const auto& [role, ov] : cfg.rules) {
    auto it = std::find_if(rules.begin(), rules.end(), [&](const MatcherRule& r) { return r.role == role; });
    if (it == rules.end()) continue;
    it->annotation_names.insert(it->annotation_names.end(), ov.annotations.begin(), ov.annotations.end());
    it->name_suffixes.insert(it->name_suffixes.end(), ov.suffixes.begin(), ov.suffixes.end());
  }
  validate_ruleset(rules);
  return rules;
}

std::vector<SourceTree> resolve_services(const RunConfig& cfg, const std::vector<std::string>& only) {
  std::set<std::string> wanted(only.begin(), only.end());
  std::vector<SourceTree> trees;
  if (cfg.auto_discover) {
    std::error_code ec;
    if (!fs::is_directory(cfg.services_root, ec))
      throw ConfigError("services_root", "not a directory: " + cfg.services_root.string());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(cfg.services_root, ec))
      if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    const auto globs = default_globs(cfg.auto_convention);
    for (const auto& d : dirs) {
      const auto name = d.filename().string();
      if (!wanted.empty() && !wanted.count(name)) continue;
      if (!has_source_files(d, globs)) continue;
      trees.push_back({name, d, {}, cfg.auto_convention});
    }
  } else {
    for (const auto& entry : cfg.services) {
      if (!wanted.empty() && !wanted.count(entry.tree.service_name)) continue;
      std::error_code ec;
      if (!fs::is_directory(entry.tree.root_dir, ec))
        throw ConfigError(entry.field + ".root_dir", "not a directory: " + entry.tree.root_dir.string());
      trees.push_back(entry.tree);
    }
  }
  for (const auto& name : wanted) {
    if (std::none_of(trees.begin(), trees.end(), [&](const SourceTree& t) { return t.service_name == name; }))
      throw ConfigError("--services", "unknown service '" + name + "'");
  }
  if (trees.empty()) throw ConfigError("services", "no services to analyze");
  return trees;
}

RunResult run_pipeline(const RunConfig& cfg, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  for (const auto& f : options.formats)
    if (std::find(kAllFormats.begin(), kAllFormats.end(), f) == kAllFormats.end())
      throw ConfigError("--format", "unknown format '" + f + "'");
  auto want = [&](std::string_view f) {
    return std::find(options.formats.begin(), options.formats.end(), f) != options.formats.end();
  };

  const auto trees = resolve_services(cfg, options.services);
  const unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());

  std::optional<Taxonomy> taxonomy;
  if (cfg.taxonomy_path) {
    try {
      taxonomy = Taxonomy::parse(util::read_file(*cfg.taxonomy_path));
    } catch (const Error& e) {
      throw ConfigError("taxonomy_path", e.what());
    }
  }
  std::optional<TopologyModel> topology;
  if (!cfg.compose_paths.empty()) {
    std::vector<TopologyModel> models;
    for (std::size_t i = 0; i < cfg.compose_paths.size(); ++i) {
      try {
        const auto& p = cfg.compose_paths[i];
        models.push_back(parse_compose(util::read_file(p), p.filename().string()));
      } catch (const Error& e) {
        throw ConfigError("compose_paths[" + std::to_string(i) + "]", e.what());
      }
    }
    topology = merge_topologies(std::move(models));
  }

  fs::path out_dir = options.out_dir ? *options.out_dir : cfg.output_dir;
  {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw ConfigError("output_dir", "cannot create " + out_dir.string());
  }

  struct PerService {
    Extraction extraction;
    MatchResult matches;
  };
  std::vector<PerService> work(trees.size());
  util::parallel_for(trees.size(), jobs, [&](std::size_t i) {
    const auto& tree = trees[i];
    work[i].extraction = extract(tree, cfg.idioms, 1);
    work[i].matches = run_matchers(work[i].extraction.root, effective_ruleset(cfg, tree.convention), tree.service_name,
                                   cfg.idioms);
  });

  RunResult result;
  std::vector<std::string> taken;
  std::vector<ServiceIr> irs;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto& rep = work[i].extraction.report;
    log_line(options, "extracted " + trees[i].service_name + ": " + std::to_string(rep.files_scanned) + " files, " +
                          std::to_string(rep.nodes_emitted) + " nodes, " + std::to_string(rep.files_skipped.size()) +
                          " skipped");
    auto ir = build_service_ir(std::move(work[i].matches), rep, taken);
    validate_service_ir(ir);
    taken.push_back(ir.service_name);
    irs.push_back(std::move(ir));
  }

  result.system = weave(irs, taxonomy ? &*taxonomy : nullptr, topology ? &*topology : nullptr, cfg.weave, jobs);
  log_line(options, "woven " + std::to_string(result.system.services.size()) + " services: " +
                        std::to_string(result.system.comm_edges.size()) + " comm edges, " +
                        std::to_string(result.system.event_edges.size()) + " event edges, " +
                        std::to_string(result.system.context_map.matches.size()) + " entity matches");

  AnalysisConfig acfg;
  acfg.entity_threshold = cfg.weave.entity_threshold;
  acfg.call_threshold = cfg.weave.call_threshold;
  acfg.checks = cfg.checks;
  result.findings = run_checks(result.system, acfg);
  result.coupling = coupling_metrics(result.system);
  result.exit_status = exit_status(result.findings);

  auto write = [&](const std::string& name, const std::string& contents) {
    const auto path = out_dir / name;
    util::write_file_atomic(path, contents);
    result.written.push_back(path);
  };
  for (std::size_t i = 0; i < trees.size(); ++i) {
    write(trees[i].service_name + ".laast.json", save_laast(work[i].extraction.root));
  }
  for (const auto& ir : result.system.services) write(ir.service_name + ".ir.json", save_service_ir(ir));
  if (want("json")) {
    write("system.json", export_system_json(result.system));
    write("context-map.json", export_context_map_json(result.system.context_map));
    write("report.json", export_report(result.findings, result.coupling, ReportFormat::Json));
  }
  if (want("dot")) {
    for (auto view : {DotView::Services, DotView::Context, DotView::Full})
      write("graph-" + std::string(to_string(view)) + ".dot", export_dot(result.system, view));
  }
  if (want("text")) write("report.txt", export_report(result.findings, result.coupling, ReportFormat::Text));

  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  log_line(options, std::to_string(result.findings.size()) + " findings, exit status " +
                        std::to_string(result.exit_status) + " (" + std::to_string(ms.count()) + " ms)");
  return result;
}

int run(const fs::path& config_path, const RunOptions& options, std::string* error) {
  try {
    return run_pipeline(load_run_config(config_path), options).exit_status;
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    if (options.log) options.log(std::string("error: ") + e.what());
    return kExitToolFailure;
  }
}

}  // namespace weft
