#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcidc {

// Root of every error the engine raises. The CLI maps each subclass onto an
// exit code and a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A linear system stayed singular after the ridge retry, or cluster centers
// collapsed onto each other.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (negative lambda, odd depth, widening encoder).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `offset` is a byte offset for binary input and a
// 1-based line number for text input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// The training loss became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace dcidc
