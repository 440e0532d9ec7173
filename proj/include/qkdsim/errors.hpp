#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkdsim {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value type's invariant does not hold (e.g. a non-PSD density matrix).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Base for data-validation failures: bad count files, incomplete tables,
/// sessions that produced nothing usable.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IncompleteTableError : public ValidationError {
 public:
  IncompleteTableError(const std::string& what, std::vector<std::string> missing)
      : ValidationError(what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class NoSiftedBitsError : public ValidationError {
 public:
  NoSiftedBitsError() : ValidationError("no sifted bits: no coincidences in compatible bases") {}
};

/// Parse failure with 1-based line/column into the source text.
class ParseError : public ValidationError {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message)
      : ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                        message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Bad configuration (CLI flags, config file schema). Names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qkdsim
