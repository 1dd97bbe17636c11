#ifndef PDDLENV_ERRORS_HPP
#define PDDLENV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pddlenv {

/// Root of every exception thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violations of core-model invariants (unknown symbols, ill-typed
/// bindings, grounding with unbound variables).
class ModelError : public Error {
 public:
  enum class Kind { Declaration, Typing, Grounding };

  ModelError(Kind kind, const std::string& message)
      : Error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Bad environment registration (missing action predicates, shared
/// action predicates, no problems).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition (step before reset, action
/// over an unknown predicate, free variables where a closed formula is
/// required).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Raised by step when no operator matches and the environment was
/// configured to treat that as an error.
class InvalidActionError : public Error {
 public:
  using Error::Error;
};

/// Valid-only sampling asked for an action in a state with none.
class DeadEndError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Unknown registry name.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace pddlenv

#endif  // PDDLENV_ERRORS_HPP
