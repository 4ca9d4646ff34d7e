#pragma once

#include <stdexcept>
#include <string>

#include "minkhoro/types.hpp"

namespace mh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad shapes, non-finite input, malformed descriptors.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input outside the set where an operation is defined, e.g. <nu, v> <= 0.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The norm violates strict convexity (non-unique support point, flat facet).
class ConvexityError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Violation of the ball-minimum structure a horofunction must have.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ComputationError : public Error {
 public:
  ComputationError(const std::string& what, Vector best_iterate)
      : Error(what), best_(std::move(best_iterate)) {}
  const Vector& best_iterate() const { return best_; }

 private:
  Vector best_;
};

class LimitError : public Error {
 public:
  LimitError(const std::string& what, double last, double previous)
      : Error(what), last_(last), previous_(previous) {}
  double last() const { return last_; }
  double previous() const { return previous_; }

 private:
  double last_;
  double previous_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = -1, int column = -1)
      : Error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace mh
