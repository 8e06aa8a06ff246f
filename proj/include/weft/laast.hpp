#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace weft {

/// Closed node inventory of the language-agnostic AST. Frontends extend
/// the model through attributes, never through new kinds.
enum class NodeKind {
  CompilationUnit,
  TypeDecl,
  FieldDecl,
  MethodDecl,
  Param,
  Annotation,
  Call,
  Literal,
  TypeRef,
  Block,
  Unknown,
};

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;

/// Literal and TypeRef nodes never carry children.
constexpr bool is_leaf_kind(NodeKind kind) noexcept {
  return kind == NodeKind::Literal || kind == NodeKind::TypeRef;
}

struct SourceSpan {
  std::string file;  // relative to the service root, forward slashes
  int line_start = 1;
  int line_end = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
  friend auto operator<=>(const SourceSpan&, const SourceSpan&) = default;
};

using Attributes = std::vector<std::pair<std::string, std::string>>;

struct LaastNode {
  NodeKind kind = NodeKind::Unknown;
  std::optional<std::string> name;
  Attributes attributes;  // insertion order is significant
  std::vector<LaastNode> children;
  std::optional<SourceSpan> span;  // absent for synthetic nodes

  LaastNode() = default;
  explicit LaastNode(NodeKind k, std::optional<std::string> n = std::nullopt)
      : kind(k), name(std::move(n)) {}

  const std::string* attribute(std::string_view key) const noexcept;
  std::string attribute_or(std::string_view key, std::string_view fallback) const;
  // Replaces an existing value in place, otherwise appends.
  void set_attribute(std::string key, std::string value);

  friend bool operator==(const LaastNode&, const LaastNode&) = default;
};

/// Parses and validates a `.laast.json` document.
/// Throws MalformedDocument on JSON syntax errors and SchemaViolation
/// (naming the offending path) on any invariant breach.
LaastNode load_laast(std::string_view document);

/// Canonical serialization: fixed key order, compact separators.
std::string save_laast(const LaastNode& root);

/// Checks every node invariant; throws SchemaViolation.
void validate_laast(const LaastNode& root);

/// Ancestors of the visited node, root first; empty for the root itself.
using AncestorPath = std::span<const LaastNode* const>;
using LaastVisitor = std::function<void(const LaastNode&, AncestorPath)>;

/// Pre-order depth-first traversal. Returns the number of visited nodes.
std::size_t walk(const LaastNode& root, const LaastVisitor& visitor);

std::size_t count_nodes(const LaastNode& root);

}  // namespace weft
