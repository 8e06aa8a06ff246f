#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace weft::testing {

struct DotEdge {
  std::string from;
  std::string to;
  std::map<std::string, std::string> attrs;
};

struct DotGraph {
  bool directed = false;
  std::string name;
  std::set<std::string> nodes;  // declared or used by an edge
  std::map<std::string, std::map<std::string, std::string>> node_attrs;
  std::vector<DotEdge> edges;
  std::vector<std::string> subgraphs;
};

/// Reads the subset of the DOT language the exporter emits (plus a bit
/// more). Throws std::runtime_error with the offending position.
DotGraph read_dot(std::string_view text);

}  // namespace weft::testing
