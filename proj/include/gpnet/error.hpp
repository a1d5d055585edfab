#pragma once

#include <stdexcept>
#include <string>

namespace gpnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible; the message names both shapes.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid configuration value (bad hyperparameter, impossible sizes, unknown key).
struct ConfigError : Error {
  using Error::Error;
};

// Numerically undefined request, e.g. log of a non-positive entry.
struct DomainError : Error {
  using Error::Error;
};

// An API precondition was violated (non-scalar loss, bad batch composition).
struct ContractError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct FileNotFoundError : IoError {
  using IoError::IoError;
};

}  // namespace gpnet
