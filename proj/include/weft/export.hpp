#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weft/analysis.hpp"
#include "weft/weave.hpp"

namespace weft {

enum class DotView { Services, Context, Full };
std::string_view to_string(DotView view) noexcept;

/// Graphviz text with sorted nodes and edges, one statement per line.
std::string export_dot(const SystemIr& sys, DotView view);

enum class ReportFormat { Json, Text };

std::string export_report(const std::vector<Finding>& findings, const CouplingReport& metrics, ReportFormat format);

std::string export_system_json(const SystemIr& sys);
std::string export_context_map_json(const ContextMap& map);

}  // namespace weft
