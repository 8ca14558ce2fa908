#pragma once

#include <stdexcept>
#include <string>

namespace tegrec {

/// Precondition or invariant violated by an argument.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input file (trace CSV, efficiency table).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration. The message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline void require(bool cond, const char* msg) {
  if (!cond) throw DomainError(msg);
}

}  // namespace detail
}  // namespace tegrec
