#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "weft/weave.hpp"

namespace weft {

enum class Severity { Error, Warning, Info };
std::string_view to_string(Severity s) noexcept;
std::optional<Severity> parse_severity(std::string_view text) noexcept;

struct Subject {
  std::string service;
  std::string ref;  // component, `Component.method`, `Entity.field` or an edge
  std::optional<SourceSpan> span;
  friend bool operator==(const Subject&, const Subject&) = default;
};
bool operator<(const Subject& a, const Subject& b);

struct Finding {
  std::string rule_id;
  Severity severity = Severity::Warning;
  std::string message;
  std::vector<Subject> subjects;
  friend bool operator==(const Finding&, const Finding&) = default;
};

struct RuleInfo {
  std::string_view id;
  std::string_view name;
  Severity default_severity;
  std::string_view summary;
};

/// The closed catalog, in rule-id order.
const std::vector<RuleInfo>& rule_catalog();
const RuleInfo* find_rule(std::string_view id);

struct CheckOverride {
  bool enabled = true;
  std::optional<Severity> severity;
  friend bool operator==(const CheckOverride&, const CheckOverride&) = default;
};

struct AnalysisConfig {
  double entity_threshold = 0.65;
  double call_threshold = 0.8;
  std::map<std::string, CheckOverride> checks;
};

/// Findings sorted by (rule_id, subjects).
std::vector<Finding> run_checks(const SystemIr& sys, const AnalysisConfig& cfg = {});

struct ServiceCoupling {
  std::string service;
  int ais = 0;  // distinct services depending on this one
  int ads = 0;  // distinct services this one depends on
  double instability = 0.0;
  friend bool operator==(const ServiceCoupling&, const ServiceCoupling&) = default;
};

struct CouplingReport {
  std::vector<ServiceCoupling> services;  // sorted by name
  int dependencies = 0;                   // distinct ordered service pairs
  double mean_instability = 0.0;
  friend bool operator==(const CouplingReport&, const CouplingReport&) = default;
};

/// Counts distinct service pairs over comm and event edges, self-pairs excluded.
CouplingReport coupling_metrics(const SystemIr& sys);

using ServiceGraph = std::map<std::string, std::set<std::string>>;

/// Distinct caller -> callee service pairs from comm edges, self-loops dropped.
ServiceGraph comm_graph(const SystemIr& sys);

/// All elementary cycles, each rotated so its smallest node comes first,
/// in lexicographic order. Self-loops are not reported.
std::vector<std::vector<std::string>> detect_cycles(const ServiceGraph& graph);

/// 2 with any error, 1 with any warning, else 0. Info findings never count.
int exit_status(const std::vector<Finding>& findings);

}  // namespace weft
