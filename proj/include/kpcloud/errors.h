#pragma once

#include <stdexcept>
#include <string>

namespace kpcloud {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text input that cannot be parsed (JSON, ARPA, TSV, timestamps).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Corrupt or truncated binary container.
class FormatError : public Error {
 public:
  using Error::Error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Feature vector / model schema disagreement.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kpcloud
