#pragma once

#include <stdexcept>
#include <string>

namespace pb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: unknown ids, violated instance invariants, malformed arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  missing_section,
  missing_key,
  unsupported_vote_type,
  malformed_number,
  dangling_project,
  duplicate_id,
  malformed_row,
  count_mismatch,
  schema,
};

inline const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::missing_section: return "missing section";
    case ParseErrorKind::missing_key: return "missing key";
    case ParseErrorKind::unsupported_vote_type: return "unsupported vote type";
    case ParseErrorKind::malformed_number: return "malformed number";
    case ParseErrorKind::dangling_project: return "dangling project reference";
    case ParseErrorKind::duplicate_id: return "duplicate id";
    case ParseErrorKind::malformed_row: return "malformed row";
    case ParseErrorKind::count_mismatch: return "count mismatch";
    case ParseErrorKind::schema: return "schema violation";
  }
  return "parse error";
}

class ParseError : public InputError {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : InputError(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

/// The operation needs a property (additivity, positive per-project value)
/// that the given satisfaction function does not have.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive search would exceed its configured size limit.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pb
