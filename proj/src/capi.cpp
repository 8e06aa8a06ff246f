#include "weft/weft.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>

#include "util.hpp"
#include "weft/errors.hpp"
#include "weft/export.hpp"
#include "weft/ir.hpp"
#include "weft/matchers.hpp"
#include "weft/pipeline.hpp"
#include "weft/weave.hpp"

struct weft_laast {
  weft::LaastNode root;
};

struct weft_service_ir {
  weft::ServiceIr ir;
};

struct weft_taxonomy {
  weft::Taxonomy taxonomy;
};

struct weft_run {
  weft::RunResult result;
};

namespace {

thread_local std::string g_last_error;

weft_status fail(weft_status status, const char* message) {
  g_last_error = message ? message : "";
  return status;
}

template <typename F>
weft_status guarded(F&& fn) {
  try {
    fn();
    return WEFT_OK;
  } catch (const weft::MalformedDocument& e) {
    return fail(WEFT_ERR_MALFORMED, e.what());
  } catch (const weft::SchemaViolation& e) {
    return fail(WEFT_ERR_SCHEMA, e.what());
  } catch (const weft::IoError& e) {
    return fail(WEFT_ERR_IO, e.what());
  } catch (const weft::ConfigError& e) {
    return fail(WEFT_ERR_CONFIG, e.what());
  } catch (const weft::DuplicateService& e) {
    return fail(WEFT_ERR_DUPLICATE_SERVICE, e.what());
  } catch (const weft::TermNotFound& e) {
    return fail(WEFT_ERR_TERM_NOT_FOUND, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(WEFT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WEFT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WEFT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WEFT_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

weft::Convention convention_or_default(const char* text) {
  if (!text) return weft::Convention::SpringLike;
  auto c = weft::parse_convention(text);
  if (!c) throw std::invalid_argument(std::string("unknown convention '") + text + "'");
  return *c;
}

std::vector<std::string> csv(const char* text) {
  std::vector<std::string> out;
  if (!text) return out;
  for (const auto& part : weft::util::split(text, ',')) {
    auto t = weft::util::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

weft::RunOptions to_options(const weft_run_options& o) {
  if (!o.config_path) throw std::invalid_argument("config_path is required");
  weft::RunOptions opts;
  if (o.out_dir) opts.out_dir = o.out_dir;
  opts.jobs = o.jobs;
  opts.services = csv(o.services);
  if (o.formats) opts.formats = csv(o.formats);
  if (o.log) {
    auto fn = o.log;
    void* user = o.user;
    opts.log = [fn, user](std::string_view line) { fn(std::string(line).c_str(), user); };
  }
  return opts;
}

}  // namespace

extern "C" {

const char* weft_version(void) { return WEFT_VERSION_STRING; }

const char* weft_last_error(void) { return g_last_error.c_str(); }

void weft_string_free(char* s) { std::free(s); }

weft_status weft_laast_load(const char* json, size_t length, weft_laast** out) {
  if (!json || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new weft_laast{weft::load_laast(std::string_view(json, length))}; });
}

weft_status weft_laast_save(const weft_laast* tree, char** out) {
  if (!tree || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = duplicate(weft::save_laast(tree->root)); });
}

size_t weft_laast_node_count(const weft_laast* tree) { return tree ? weft::count_nodes(tree->root) : 0; }

void weft_laast_free(weft_laast* tree) { delete tree; }

weft_status weft_extract(const char* service_name, const char* root_dir, const char* convention, unsigned jobs,
                         weft_laast** out) {
  if (!service_name || !root_dir || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    weft::SourceTree tree{service_name, root_dir, {}, convention_or_default(convention)};
    std::error_code ec;
    if (!std::filesystem::is_directory(tree.root_dir, ec))
      throw weft::IoError(std::string("not a directory: ") + root_dir);
    auto extraction = weft::extract(tree, {}, jobs ? jobs : 1);
    *out = new weft_laast{std::move(extraction.root)};
  });
}

weft_status weft_service_ir_build(const weft_laast* tree, const char* service_name, const char* convention,
                                  weft_service_ir** out) {
  if (!tree || !service_name || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto matches = weft::run_matchers(tree->root, weft::default_ruleset(convention_or_default(convention)), service_name);
    weft::ExtractionReport report;
    report.nodes_emitted = weft::count_nodes(tree->root);
    *out = new weft_service_ir{weft::build_service_ir(std::move(matches), std::move(report))};
  });
}

weft_status weft_service_ir_load(const char* json, size_t length, weft_service_ir** out) {
  if (!json || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new weft_service_ir{weft::load_service_ir(std::string_view(json, length))}; });
}

weft_status weft_service_ir_save(const weft_service_ir* ir, char** out) {
  if (!ir || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = duplicate(weft::save_service_ir(ir->ir)); });
}

size_t weft_service_ir_count(const weft_service_ir* ir, weft_ir_item item) {
  if (!ir) return 0;
  switch (item) {
    case WEFT_IR_COMPONENTS: return ir->ir.components.size();
    case WEFT_IR_ENDPOINTS: return ir->ir.endpoints.size();
    case WEFT_IR_REMOTE_CALLS: return ir->ir.remote_calls.size();
    case WEFT_IR_EVENT_OPS: return ir->ir.event_ops.size();
    case WEFT_IR_INTERNAL_CALLS: return ir->ir.internal_calls.size();
    case WEFT_IR_WARNINGS: return ir->ir.report.warnings.size();
  }
  return 0;
}

void weft_service_ir_free(weft_service_ir* ir) { delete ir; }

weft_status weft_taxonomy_parse(const char* text, size_t length, weft_taxonomy** out) {
  if (!text || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new weft_taxonomy{weft::Taxonomy::parse(std::string_view(text, length))}; });
}

void weft_taxonomy_free(weft_taxonomy* taxonomy) { delete taxonomy; }

weft_status weft_wu_palmer(const weft_taxonomy* taxonomy, const char* a, const char* b, double* out) {
  if (!taxonomy || !a || !b || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = weft::wu_palmer(a, b, taxonomy->taxonomy); });
}

weft_status weft_entity_similarity(const char* a, const char* b, const weft_taxonomy* taxonomy, double* score,
                                   const char** strategy) {
  if (!a || !b || !score) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto sim = weft::entity_similarity(a, b, taxonomy ? &taxonomy->taxonomy : nullptr);
    *score = sim.score;
    if (strategy) *strategy = weft::to_string(sim.strategy).data();
  });
}

weft_status weft_run_execute(const weft_run_options* options, weft_run** out) {
  if (!options || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto opts = to_options(*options);
    auto cfg = weft::load_run_config(options->config_path);
    *out = new weft_run{weft::run_pipeline(cfg, opts)};
  });
}

int weft_run_exit_status(const weft_run* run) { return run ? run->result.exit_status : weft::kExitToolFailure; }

size_t weft_run_finding_count(const weft_run* run, const char* severity) {
  if (!run) return 0;
  std::optional<weft::Severity> filter;
  if (severity) {
    filter = weft::parse_severity(severity);
    if (!filter) return 0;
  }
  size_t n = 0;
  for (const auto& f : run->result.findings)
    if (!filter || f.severity == *filter) ++n;
  return n;
}

weft_status weft_run_report(const weft_run* run, const char* format, char** out) {
  if (!run || !format || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string_view f = format;
    if (f != "json" && f != "text") throw std::invalid_argument("format must be json or text");
    *out = duplicate(weft::export_report(run->result.findings, run->result.coupling,
                                         f == "json" ? weft::ReportFormat::Json : weft::ReportFormat::Text));
  });
}

weft_status weft_run_dot(const weft_run* run, const char* view, char** out) {
  if (!run || !view || !out) return fail(WEFT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    for (auto v : {weft::DotView::Services, weft::DotView::Context, weft::DotView::Full}) {
      if (weft::to_string(v) == view) {
        *out = duplicate(weft::export_dot(run->result.system, v));
        return;
      }
    }
    throw std::invalid_argument(std::string("unknown view '") + view + "'");
  });
}

void weft_run_free(weft_run* run) { delete run; }

int weft_analyze(const weft_run_options* options) {
  weft_run* run = nullptr;
  if (weft_run_execute(options, &run) != WEFT_OK) {
    if (options && options->log) options->log((std::string("error: ") + g_last_error).c_str(), options->user);
    return weft::kExitToolFailure;
  }
  const int status = run->result.exit_status;
  weft_run_free(run);
  return status;
}

}  // extern "C"
