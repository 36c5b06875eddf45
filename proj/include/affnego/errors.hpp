#pragma once

#include <stdexcept>
#include <string>

namespace affnego {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vector arguments of incompatible length.
struct DimensionError : Error {
  using Error::Error;
};

// Argument outside the operation's domain (empty input, zero norm, bad index).
struct DomainError : Error {
  using Error::Error;
};

// Operation not allowed in the object's current state (terminal episode, untrained net).
struct StateError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Training diverged (runaway critic values).
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace affnego
