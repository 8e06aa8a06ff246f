#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weft/common.hpp"
#include "weft/frontend.hpp"
#include "weft/laast.hpp"

namespace weft {

enum class ComponentRole { Entity, Repository, Service, Controller };

std::string_view to_string(ComponentRole role) noexcept;
std::optional<ComponentRole> parse_component_role(std::string_view text) noexcept;

/// One pattern-matching agent. Annotation triggers always outrank suffix
/// triggers; `priority` resolves conflicts within each tier.
/// A suffix entry containing `*` is a glob over the type name (`*Service*`),
/// otherwise it must end the name.
struct MatcherRule {
  ComponentRole role = ComponentRole::Entity;
  std::vector<std::string> annotation_names;
  std::vector<std::string> name_suffixes;
  int priority = 0;
};

/// Throws std::invalid_argument when a rule has no trigger or two rules
/// share a priority.
void validate_ruleset(const std::vector<MatcherRule>& rules);

std::vector<MatcherRule> default_ruleset(Convention convention);

struct TypedName {
  std::string name;
  std::string declared_type;
  friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct AnnotationUse {
  std::string name;
  Attributes arguments;
  friend bool operator==(const AnnotationUse&, const AnnotationUse&) = default;
};

struct MethodSig {
  std::string name;
  std::vector<TypedName> params;
  std::string return_type;
  std::vector<AnnotationUse> annotations;
  friend bool operator==(const MethodSig&, const MethodSig&) = default;
};

struct Component {
  ComponentRole role = ComponentRole::Entity;
  std::string name;
  std::string service;
  std::vector<TypedName> fields;
  std::vector<MethodSig> methods;
  std::vector<AnnotationUse> annotations;
  std::optional<std::string> managed_entity;  // repositories: first generic argument of the supertype
  std::optional<SourceSpan> span;
  friend bool operator==(const Component&, const Component&) = default;
};

/// A type no rule classified. Kept for entity-field type resolution.
struct PlainType {
  std::string name;
  std::vector<TypedName> fields;
  std::optional<SourceSpan> span;
  friend bool operator==(const PlainType&, const PlainType&) = default;
};

enum class ParamKind { Path, Query, Body };
std::string_view to_string(ParamKind kind) noexcept;
std::optional<ParamKind> parse_param_kind(std::string_view text) noexcept;

struct EndpointParam {
  std::string name;
  ParamKind kind = ParamKind::Query;
  std::string declared_type;
  friend bool operator==(const EndpointParam&, const EndpointParam&) = default;
};

struct Endpoint {
  std::string owner;
  HttpMethod http_method = HttpMethod::ANY;
  std::vector<std::string> url_templates;
  std::vector<EndpointParam> params;
  MethodSig handler;
  std::optional<SourceSpan> span;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct RemoteCall {
  std::string caller_service;
  std::string caller_component;
  std::string caller_method;
  HttpMethod http_method = HttpMethod::UNKNOWN;
  std::string url_template;
  int arg_count = 0;
  std::optional<SourceSpan> span;
  friend bool operator==(const RemoteCall&, const RemoteCall&) = default;
};

enum class EventDirection { Publish, Subscribe };
std::string_view to_string(EventDirection direction) noexcept;
std::optional<EventDirection> parse_event_direction(std::string_view text) noexcept;

struct EventOp {
  EventDirection direction = EventDirection::Publish;
  std::string topic;
  std::string component;
  std::optional<SourceSpan> span;
  friend bool operator==(const EventOp&, const EventOp&) = default;
};

/// Non-remote call sites, consumed by the internal call graph.
struct LocalCall {
  std::string caller_component;
  std::string caller_method;
  std::string callee;
  std::optional<std::string> receiver_type;
  std::optional<SourceSpan> span;
};

struct MatchResult {
  std::string service;
  std::vector<Component> components;
  std::vector<PlainType> plain_types;
  std::vector<Endpoint> endpoints;
  std::vector<RemoteCall> remote_calls;
  std::vector<EventOp> event_ops;
  std::vector<LocalCall> local_calls;
  std::vector<Warning> warnings;
};

MatchResult run_matchers(const LaastNode& root, const std::vector<MatcherRule>& ruleset, const std::string& service,
                         const ClientIdioms& idioms = {});

/// Joins a class-level prefix and a method-level path: exactly one `/` at
/// the junction, a leading `/`, no trailing `/` except for the root.
std::string join_paths(std::string_view prefix, std::string_view path);

}  // namespace weft
