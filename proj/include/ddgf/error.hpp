#pragma once

#include <stdexcept>
#include <string>

namespace ddgf {

// Errors the caller can fix (bad input, bad config, missing files).
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public UserError {
 public:
  using UserError::UserError;
};

class DataError : public UserError {
 public:
  using UserError::UserError;
};

class ConfigError : public UserError {
 public:
  using UserError::UserError;
};

class IoError : public UserError {
 public:
  using UserError::UserError;
};

// Violations of internal contracts; these indicate a bug or a broken
// invariant rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ShapeError : public InternalError {
 public:
  using InternalError::InternalError;
};

class ContractError : public InternalError {
 public:
  using InternalError::InternalError;
};

class NumericError : public InternalError {
 public:
  using InternalError::InternalError;
};

}  // namespace ddgf
