#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ie {

/// Base of every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schema file could not be parsed or violates a schema invariant.
/// line/column are 1-based and zero when the error is not positional.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")" : what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class EmptyDocumentError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class OversizeSentenceError : public Error {
 public:
  using Error::Error;
};

class AnnotationError : public Error {
 public:
  using Error::Error;
};

class VariantMismatch : public Error {
 public:
  using Error::Error;
};

class UnnormalizableValue : public Error {
 public:
  using Error::Error;
};

class SentIdOutOfRange : public Error {
 public:
  using Error::Error;
};

class RawTextNotFound : public Error {
 public:
  using Error::Error;
};

class OverlapError : public Error {
 public:
  using Error::Error;
};

/// Backend unreachable after all retry attempts.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Backend answered but the response breaks the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ie
