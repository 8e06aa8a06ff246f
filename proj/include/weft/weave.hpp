#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "weft/ir.hpp"
#include "weft/topology.hpp"

namespace weft {

/// Rooted concept tree. Terms are stored lowercased; the root has depth 1.
class Taxonomy {
 public:
  explicit Taxonomy(std::string root);

  /// Indented text: first line is the root, two spaces per level.
  /// Throws MalformedDocument on bad indentation or duplicate terms.
  static Taxonomy parse(std::string_view text);

  /// Throws TermNotFound for an unknown parent, std::invalid_argument for a duplicate.
  void add(std::string term, std::string_view parent);

  bool contains(std::string_view term) const;
  int depth(std::string_view term) const;  // throws TermNotFound
  std::optional<std::string> parent(std::string_view term) const;
  std::string lcs(std::string_view a, std::string_view b) const;  // throws TermNotFound
  const std::string& root() const { return terms_.front(); }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::size_t index_of(std::string_view term) const;

  std::vector<std::string> terms_;
  std::vector<std::size_t> parent_;
  std::vector<int> depth_;
  std::unordered_map<std::string, std::size_t> index_;
};

double wu_palmer(std::string_view a, std::string_view b, const Taxonomy& t);

struct WeaveConfig {
  double entity_threshold = 0.65;
  double field_threshold = 0.6;
  double call_threshold = 0.8;
  std::vector<std::string> suffix_tokens{"dto", "entity", "model", "impl", "vo"};
};

/// Splits on case, digit, `_` and `-` boundaries, lowercases and strips
/// trailing suffix tokens. Falls back to the lowercased raw name.
std::vector<std::string> normalize_entity_name(std::string_view raw, std::span<const std::string> suffix_tokens);
std::vector<std::string> normalize_entity_name(std::string_view raw);

enum class SimilarityStrategy { Exact, Token, Taxonomy };
std::string_view to_string(SimilarityStrategy s) noexcept;

struct Similarity {
  double score = 0.0;
  SimilarityStrategy strategy = SimilarityStrategy::Token;
};

/// Max of exact (equal token lists), Jaccard over token sets and the
/// taxonomy score: greedy one-to-one pairing of covered tokens by
/// descending Wu-Palmer, summed and divided by the larger covered count.
Similarity entity_similarity(std::string_view a, std::string_view b, const Taxonomy* taxonomy,
                             const WeaveConfig& cfg = {});

struct EntityRef {
  std::string service;
  std::string name;
  friend bool operator==(const EntityRef&, const EntityRef&) = default;
  friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

struct FieldMatch {
  std::string field_a;
  std::string field_b;
  double score = 0.0;
  bool type_compatible = false;
  friend bool operator==(const FieldMatch&, const FieldMatch&) = default;
};

struct EntityMatch {
  EntityRef entity_a;
  EntityRef entity_b;
  double score = 0.0;
  SimilarityStrategy strategy = SimilarityStrategy::Exact;
  std::vector<FieldMatch> field_matches;
  friend bool operator==(const EntityMatch&, const EntityMatch&) = default;
};

struct ContextMap {
  std::vector<DataModel> bounded_contexts;  // sorted by service
  std::vector<EntityMatch> matches;
  friend bool operator==(const ContextMap&, const ContextMap&) = default;
};

/// Declared types compare equal after collection unwrapping and boxing of primitives.
bool types_compatible(std::string_view a, std::string_view b);

ContextMap build_context_map(std::vector<DataModel> models, const Taxonomy* taxonomy, const WeaveConfig& cfg = {});

struct CallRef {
  std::string service;
  std::size_t index = 0;  // into ServiceIr::remote_calls
  std::string component;
  std::string method;
  friend bool operator==(const CallRef&, const CallRef&) = default;
  friend auto operator<=>(const CallRef&, const CallRef&) = default;
};

struct EndpointRef {
  std::string service;
  std::size_t index = 0;  // into ServiceIr::endpoints
  std::string component;
  std::string handler;
  friend bool operator==(const EndpointRef&, const EndpointRef&) = default;
  friend auto operator<=>(const EndpointRef&, const EndpointRef&) = default;
};

struct CommEdge {
  std::string from_service;
  std::string to_service;
  CallRef call;
  EndpointRef endpoint;
  std::string matched_url_template;
  double score = 0.0;
  double confidence = 1.0;
  bool ambiguous = false;
  friend bool operator==(const CommEdge&, const CommEdge&) = default;
};

/// A remote call URL split into an optional host and path segments.
/// A leading `{*}` before the first `/` stands for an unknown base URL.
struct CallUrl {
  std::optional<std::string> host;
  std::vector<std::string> segments;
};

CallUrl parse_call_url(std::string_view url);
std::vector<std::string> path_segments(std::string_view path);
bool is_template_segment(std::string_view segment) noexcept;

/// (strong + 0.5 weak) / max length over aligned segments; 0 on a literal
/// mismatch or when the longer side's remainder is not all templates.
double path_score(std::span<const std::string> call, std::span<const std::string> endpoint);

/// 1 for equal methods, 0.9 when the call is UNKNOWN or the endpoint ANY, else 0.
double method_factor(HttpMethod call, HttpMethod endpoint) noexcept;

inline constexpr double kScoreEpsilon = 1e-12;

/// Edges for one call at the per-call maximum score, when it reaches the
/// threshold. A host resolving through `inventory` restricts candidates
/// to that service; otherwise every service is a candidate and confidence
/// is halved.
std::vector<CommEdge> match_call_to_endpoints(const ServiceIr& caller, std::size_t call_index,
                                              std::span<const ServiceIr> services, const HostInventory& inventory,
                                              const WeaveConfig& cfg = {});

struct EventEdge {
  std::string publisher;
  std::string subscriber;
  std::string topic;
  friend bool operator==(const EventEdge&, const EventEdge&) = default;
  friend auto operator<=>(const EventEdge&, const EventEdge&) = default;
};

struct Diagnostic {
  std::string severity;  // "warning" or "info"
  std::string service;
  std::string message;
  std::optional<SourceSpan> span;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct EventMatching {
  std::vector<EventEdge> edges;
  std::vector<Diagnostic> diagnostics;
};

EventMatching match_events(std::span<const ServiceIr> services);

struct SystemMetadata {
  std::string tool_version;
  std::string config_digest;
  friend bool operator==(const SystemMetadata&, const SystemMetadata&) = default;
};

struct SystemIr {
  std::vector<ServiceIr> services;  // sorted by name
  ContextMap context_map;
  std::vector<CommEdge> comm_edges;
  std::vector<EventEdge> event_edges;
  std::vector<DeclaredEdge> topology_edges;  // between analyzed services only
  bool has_topology = false;
  HostInventory inventory;
  std::vector<Diagnostic> diagnostics;
  SystemMetadata metadata;
  friend bool operator==(const SystemIr&, const SystemIr&) = default;
};

std::string config_digest(const WeaveConfig& cfg);

/// Throws DuplicateService. Output does not depend on the order of `irs`.
SystemIr weave(std::vector<ServiceIr> irs, const Taxonomy* taxonomy, const TopologyModel* topology,
               const WeaveConfig& cfg = {}, unsigned jobs = 1);

}  // namespace weft
