#pragma once

#include <stdexcept>
#include <string>

namespace hems {

/// Base of every error the engine raises on bad input or state.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (vocabulary, bounds, config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed (trace files, tariff files, timestamps).
class ParseError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Operation conflicts with existing state (duplicate id, replayed event, disabled advice).
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace hems
