#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weft/analysis.hpp"
#include "weft/frontend.hpp"
#include "weft/matchers.hpp"
#include "weft/weave.hpp"

namespace weft {

struct RuleOverride {
  std::vector<std::string> annotations;
  std::vector<std::string> suffixes;
};

struct ServiceEntry {
  SourceTree tree;
  std::string field;  // config location, e.g. `services[1]`
};

struct RunConfig {
  std::filesystem::path base_dir;  // relative paths resolve against it
  bool auto_discover = false;
  std::filesystem::path services_root;
  Convention auto_convention = Convention::SpringLike;
  std::vector<ServiceEntry> services;
  std::optional<std::filesystem::path> taxonomy_path;
  std::vector<std::filesystem::path> compose_paths;
  WeaveConfig weave;
  std::map<ComponentRole, RuleOverride> rules;
  std::map<std::string, CheckOverride> checks;
  ClientIdioms idioms;
  std::filesystem::path output_dir;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(std::string_view json, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Default rules for the convention with the configured triggers appended.
std::vector<MatcherRule> effective_ruleset(const RunConfig& cfg, Convention convention);

inline const std::vector<std::string> kAllFormats{"dot", "json", "text"};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  unsigned jobs = 0;                       // 0 selects the available parallelism
  std::vector<std::string> services;       // empty means all
  std::vector<std::string> formats = kAllFormats;
  std::function<void(std::string_view)> log;
};

struct RunResult {
  SystemIr system;
  std::vector<Finding> findings;
  CouplingReport coupling;
  std::vector<std::filesystem::path> written;
  int exit_status = 0;
};

/// Resolves the selected source trees (ConfigError on a bad entry).
std::vector<SourceTree> resolve_services(const RunConfig& cfg, const std::vector<std::string>& only);

/// Extract, match, weave, analyze and write outputs. Throws on failure.
RunResult run_pipeline(const RunConfig& cfg, const RunOptions& options);

inline constexpr int kExitToolFailure = 3;

/// Loads the config and runs; failures map to status 3 with the message in `error`.
int run(const std::filesystem::path& config_path, const RunOptions& options, std::string* error = nullptr);

}  // namespace weft
