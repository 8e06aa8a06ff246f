#pragma once

#include <optional>
#include <set>
#include <string>

#include "util.hpp"
#include "weft/ir.hpp"

// JSON codecs shared by the .ir.json, system.json and report writers.
namespace weft::codec {

using util::ojson;

/// Field access with path-qualified SchemaViolation errors and rejection of
/// unknown keys once `finish()` is called.
class ObjectReader {
 public:
  ObjectReader(const ojson& j, std::string path);
  const ojson* optional(const std::string& key);
  const ojson& required(const std::string& key);
  std::string string(const std::string& key);
  std::optional<std::string> optional_string(const std::string& key);
  long long integer(const std::string& key);
  double number(const std::string& key);
  bool boolean(const std::string& key);
  const ojson& array(const std::string& key);  // empty array when absent
  void finish() const;
  std::string path(const std::string& key) const { return path_ + "." + key; }

 private:
  const ojson& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ojson span_to_json(const SourceSpan& span);
SourceSpan span_from_json(const ojson& j, const std::string& path);

ojson component_to_json(const Component& c);
ojson endpoint_to_json(const Endpoint& e);
ojson remote_call_to_json(const RemoteCall& c);
ojson event_op_to_json(const EventOp& e);
ojson service_ir_to_json(const ServiceIr& ir);
ServiceIr service_ir_from_json(const ojson& j, const std::string& path);

}  // namespace weft::codec
