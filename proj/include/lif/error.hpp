#pragma once

#include <stdexcept>
#include <string>

namespace lif {

/// Broad error class; the CLI maps these onto exit codes.
enum class ErrorKind { Validation, Io, Format };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// What went wrong while decoding an LIDM payload.
enum class FormatFault { EmptyMatrix, BadMagic, BadVersion, Truncated, TrailingBytes, NonFinite };

class FormatError : public Error {
 public:
  FormatError(FormatFault fault, const std::string& what) : Error(ErrorKind::Format, what), fault_(fault) {}
  [[nodiscard]] FormatFault fault() const noexcept { return fault_; }

 private:
  FormatFault fault_;
};

}  // namespace lif
