#include "weft/laast.hpp"

#include <array>

#include "util.hpp"
#include "weft/errors.hpp"

namespace weft {
namespace {

using util::ojson;

constexpr std::array<std::string_view, 11> kKindNames = {
    "CompilationUnit", "TypeDecl", "FieldDecl", "MethodDecl", "Param", "Annotation",
    "Call",            "Literal",  "TypeRef",   "Block",      "Unknown",
};

std::string child_path(const std::string& parent, std::size_t index) {
  return parent + ".children[" + std::to_string(index) + "]";
}

void check_span(const SourceSpan& span, const std::string& path) {
  if (span.file.empty()) throw SchemaViolation(path + ".span.file", "file must be non-empty");
  if (span.file.find('\\') != std::string::npos)
    throw SchemaViolation(path + ".span.file", "file must use forward slashes");
  if (span.line_start < 1) throw SchemaViolation(path + ".span.line_start", "must be >= 1");
  if (span.line_end < span.line_start)
    throw SchemaViolation(path + ".span.line_end", "must be >= line_start");
}

void validate_node(const LaastNode& node, const std::string& path) {
  if (is_leaf_kind(node.kind) && !node.children.empty())
    throw SchemaViolation(path, std::string("leaf kind ") + std::string(to_string(node.kind)) +
                                    " must not have children");
  if (node.span) check_span(*node.span, path);
  for (std::size_t i = 0; i < node.children.size(); ++i)
    validate_node(node.children[i], child_path(path, i));
}

int read_line_number(const ojson& value, const std::string& path) {
  if (!value.is_number_integer()) throw SchemaViolation(path, "expected an integer");
  const auto n = value.get<std::int64_t>();
  if (n < 1 || n > 0x7fffffff) throw SchemaViolation(path, "line number out of range");
  return static_cast<int>(n);
}

LaastNode node_from_json(const ojson& j, const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(path, "node must be an object");
  LaastNode node;
  bool have_kind = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      if (!value.is_string()) throw SchemaViolation(path + ".kind", "kind must be a string");
      auto kind = parse_node_kind(value.get_ref<const std::string&>());
      if (!kind)
        throw SchemaViolation(path + ".kind",
                              "unknown node kind '" + value.get<std::string>() + "'");
      node.kind = *kind;
      have_kind = true;
    } else if (key == "name") {
      if (!value.is_string()) throw SchemaViolation(path + ".name", "name must be a string");
      node.name = value.get<std::string>();
    } else if (key == "attributes") {
      if (!value.is_object()) throw SchemaViolation(path + ".attributes", "must be an object");
      for (const auto& [akey, aval] : value.items()) {
        if (!aval.is_string())
          throw SchemaViolation(path + ".attributes." + akey, "attribute values must be strings");
        node.attributes.emplace_back(akey, aval.get<std::string>());
      }
    } else if (key == "span") {
      if (!value.is_object()) throw SchemaViolation(path + ".span", "must be an object");
      SourceSpan span;
      bool f = false, s = false, e = false;
      for (const auto& [skey, sval] : value.items()) {
        if (skey == "file") {
          if (!sval.is_string()) throw SchemaViolation(path + ".span.file", "must be a string");
          span.file = sval.get<std::string>();
          f = true;
        } else if (skey == "line_start") {
          span.line_start = read_line_number(sval, path + ".span.line_start");
          s = true;
        } else if (skey == "line_end") {
          span.line_end = read_line_number(sval, path + ".span.line_end");
          e = true;
        } else {
          throw SchemaViolation(path + ".span." + skey, "unknown span field");
        }
      }
      if (!f || !s || !e) throw SchemaViolation(path + ".span", "span needs file, line_start, line_end");
      check_span(span, path);
      node.span = std::move(span);
    } else if (key == "children") {
      if (!value.is_array()) throw SchemaViolation(path + ".children", "must be an array");
      node.children.reserve(value.size());
      for (std::size_t i = 0; i < value.size(); ++i)
        node.children.push_back(node_from_json(value[i], child_path(path, i)));
    } else {
      throw SchemaViolation(path + "." + key, "unknown node field");
    }
  }
  if (!have_kind) throw SchemaViolation(path, "missing kind");
  if (is_leaf_kind(node.kind) && !node.children.empty())
    throw SchemaViolation(path, std::string("leaf kind ") + std::string(to_string(node.kind)) +
                                    " must not have children");
  return node;
}

ojson node_to_json(const LaastNode& node) {
  ojson j = ojson::object();
  j["kind"] = std::string(to_string(node.kind));
  if (node.name) j["name"] = *node.name;
  if (!node.attributes.empty()) {
    ojson attrs = ojson::object();
    for (const auto& [k, v] : node.attributes) attrs[k] = v;
    j["attributes"] = std::move(attrs);
  }
  if (node.span) {
    ojson span = ojson::object();
    span["file"] = node.span->file;
    span["line_start"] = node.span->line_start;
    span["line_end"] = node.span->line_end;
    j["span"] = std::move(span);
  }
  if (!node.children.empty()) {
    ojson children = ojson::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
  }
  return j;
}

std::size_t walk_impl(const LaastNode& node, std::vector<const LaastNode*>& path,
                      const LaastVisitor& visitor) {
  visitor(node, AncestorPath(path.data(), path.size()));
  std::size_t count = 1;
  path.push_back(&node);
  for (const auto& child : node.children) count += walk_impl(child, path, visitor);
  path.pop_back();
  return count;
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == text) return static_cast<NodeKind>(i);
  return std::nullopt;
}

const std::string* LaastNode::attribute(std::string_view key) const noexcept {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

std::string LaastNode::attribute_or(std::string_view key, std::string_view fallback) const {
  const auto* v = attribute(key);
  return v ? *v : std::string(fallback);
}

void LaastNode::set_attribute(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
}

LaastNode load_laast(std::string_view document) {
  ojson j;
  try {
    j = ojson::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedDocument(std::string("malformed LAAST document: ") + e.what());
  }
  return node_from_json(j, "$");
}

std::string save_laast(const LaastNode& root) { return util::dump_compact(node_to_json(root)); }

void validate_laast(const LaastNode& root) { validate_node(root, "$"); }

std::size_t walk(const LaastNode& root, const LaastVisitor& visitor) {
  std::vector<const LaastNode*> path;
  return walk_impl(root, path, visitor);
}

std::size_t count_nodes(const LaastNode& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += count_nodes(c);
  return n;
}

}  // namespace weft
