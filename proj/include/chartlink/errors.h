#ifndef CHARTLINK_ERRORS_H_
#define CHARTLINK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace chartlink {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document. `field()` is a JSON-pointer-like path
// ("channels/x/scale/domain") of the offending value, empty if unknown.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string &message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

// Chart violates the supported-chart constraints (single mark, single
// cartesian view, position and color channels only).
class UnsupportedChartError : public Error {
 public:
  using Error::Error;
};

// Value outside a scale's domain, or an operation the scale kind
// does not support.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// NLP backend failure or unavailable capability.
class BackendError : public Error {
 public:
  using Error::Error;
};

// No dependency path between two spans (different sentences).
class NoPathError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable case files.
class LoadError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Stale revision or duplicate identifier.
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace chartlink

#endif  // CHARTLINK_ERRORS_H_
