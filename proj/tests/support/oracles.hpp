#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "generators.hpp"
#include "weft/laast.hpp"

// Brute-force reference implementations. None of them calls into the
// library code they are compared against.
namespace weft::testing {

/// Deepest common ancestor found by enumerating every ancestor pair.
double oracle_wu_palmer(const RandomTaxonomy& t, std::size_t a, std::size_t b);

struct OracleEdge {
  std::string service;
  std::size_t index = 0;
  std::string tmpl;
  double score = 0.0;
  double confidence = 0.0;
};

/// Scores every (call, endpoint, template) triple directly from the
/// structured instance. Edges come back sorted by (service, index).
std::vector<OracleEdge> oracle_match(const MatchInstance& inst, std::size_t call, double theta = 0.8);

/// Every simple cycle of length >= 2, rotated to start at its smallest
/// node, sorted. Found by trying each subset in each order.
std::vector<std::vector<std::string>> oracle_cycles(const std::map<std::string, std::set<std::string>>& graph);

/// Pre-order listing by plain recursion: (node, depth).
std::vector<std::pair<const LaastNode*, std::size_t>> oracle_preorder(const LaastNode& root);

struct OracleCoupling {
  int ais = 0;
  int ads = 0;
  double instability = 0.0;
};

/// Recount over raw (from, to) pairs, duplicates and self-pairs included in the input.
std::map<std::string, OracleCoupling> oracle_coupling(const std::vector<std::string>& services,
                                                      const std::vector<std::pair<std::string, std::string>>& edges);

}  // namespace weft::testing
