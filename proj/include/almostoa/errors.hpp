#pragma once

#include <stdexcept>
#include <string>

namespace almostoa {

/// Base for every failure the repository reports to its callers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

/// An access transition the acting party is not allowed to make.
class ForbiddenTransition : public Error {
 public:
  using Error::Error;
};

class NotRequestable : public Error {
 public:
  using Error::Error;
};

class AttestationRequired : public Error {
 public:
  using Error::Error;
};

class InvalidAddress : public Error {
 public:
  using Error::Error;
};

class UnknownToken : public Error {
 public:
  using Error::Error;
};

class DecisionConflict : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class InvalidPeriod : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace almostoa
