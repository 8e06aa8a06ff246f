#pragma once

#include <stdexcept>
#include <string>

namespace weft {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax-level failure while reading an interchange document.
class MalformedDocument : public Error {
 public:
  using Error::Error;
};

/// The document parsed but violates the schema. `path()` points at the
/// offending node or field, e.g. `$.children[2].span`.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class DuplicateService : public Error {
 public:
  explicit DuplicateService(const std::string& name)
      : Error("duplicate service name '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class TermNotFound : public Error {
 public:
  explicit TermNotFound(const std::string& term)
      : Error("term '" + term + "' not found in taxonomy") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. `field()` names the offending config field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace weft
