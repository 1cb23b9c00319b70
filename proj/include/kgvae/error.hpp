#pragma once

#include <stdexcept>
#include <string>

namespace kgvae {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data or arguments violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Tensor shapes are incompatible for the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an API contract (e.g. backward on a non-scalar).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input (JSONL corpora, checkpoints, configs).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A loss or parameter became NaN/Inf.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgvae
