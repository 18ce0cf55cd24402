#ifndef CFLOW_ERROR_HPP
#define CFLOW_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cflow {

enum class ErrorKind {
  InvalidArgument,
  ShapeMismatch,
  Dimensionality,
  EmptyForeground,
  EmptySet,
  NonFinite,
  DegenerateInput,
  Io,
  MalformedHeader,
  Truncated,
  UnsupportedMaxval,
  BadMagic,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::Dimensionality: return "dimensionality";
    case ErrorKind::EmptyForeground: return "empty foreground";
    case ErrorKind::EmptySet: return "empty set";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::DegenerateInput: return "degenerate input";
    case ErrorKind::Io: return "i/o";
    case ErrorKind::MalformedHeader: return "malformed header";
    case ErrorKind::Truncated: return "truncated payload";
    case ErrorKind::UnsupportedMaxval: return "unsupported maxval";
    case ErrorKind::BadMagic: return "bad magic";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_io() const noexcept {
    switch (kind_) {
      case ErrorKind::Io:
      case ErrorKind::MalformedHeader:
      case ErrorKind::Truncated:
      case ErrorKind::UnsupportedMaxval:
      case ErrorKind::BadMagic:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace cflow

#endif  // CFLOW_ERROR_HPP
