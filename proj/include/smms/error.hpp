#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smms {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the domain of an operation: point outside the chart, invalid
// parameter range, unbound variable, log of a nonpositive number.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Singular metric, step-size underflow, non-finite quadrature values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace smms
