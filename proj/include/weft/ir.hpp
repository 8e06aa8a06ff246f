#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weft/frontend.hpp"
#include "weft/matchers.hpp"

namespace weft {

struct MethodRef {
  std::string component;
  std::string method;
  friend bool operator==(const MethodRef&, const MethodRef&) = default;
  friend auto operator<=>(const MethodRef&, const MethodRef&) = default;
};

struct CallEdge {
  MethodRef caller;
  MethodRef callee;
  friend bool operator==(const CallEdge&, const CallEdge&) = default;
  friend auto operator<=>(const CallEdge&, const CallEdge&) = default;
};

/// One microservice's extracted model.
struct ServiceIr {
  std::string service_name;
  std::vector<Component> components;
  std::vector<PlainType> plain_types;
  std::vector<Endpoint> endpoints;
  std::vector<RemoteCall> remote_calls;
  std::vector<EventOp> event_ops;
  std::vector<CallEdge> internal_calls;
  ExtractionReport report;

  friend bool operator==(const ServiceIr&, const ServiceIr&) = default;
};

struct EntityRelation {
  std::string from;
  std::string field;
  std::string to;
  friend bool operator==(const EntityRelation&, const EntityRelation&) = default;
};

struct DataModel {
  std::string service_name;
  std::vector<Component> entities;
  std::vector<EntityRelation> relations;
  friend bool operator==(const DataModel&, const DataModel&) = default;
};

/// Assembles the IR. A call through a field resolves only when the field's
/// type is a component declaring the callee. Other calls resolve to the
/// caller's own method, else by callee name across components; a name
/// declared by several components yields a warning and no edge.
/// Throws DuplicateService when the name is already in `taken_names`.
ServiceIr build_service_ir(MatchResult matches, ExtractionReport report,
                           std::span<const std::string> taken_names = {});

DataModel derive_data_model(const ServiceIr& ir);

/// `List<X>`, `Set<X>`, `Collection<X>`, `Optional<X>` and `X[]` unwrap to
/// `X`; package qualifiers are dropped.
std::string unwrap_collection(std::string_view declared_type);

/// Referential integrity and field invariants; throws SchemaViolation.
void validate_service_ir(const ServiceIr& ir);

std::string save_service_ir(const ServiceIr& ir);
ServiceIr load_service_ir(std::string_view document);

}  // namespace weft
