#pragma once

#include <stdexcept>
#include <string>

namespace hrsn {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not match the contract of an operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (embeddings, corpus, config, checkpoint).
class FormatError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf reached a place that requires finite values; usually divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hrsn
