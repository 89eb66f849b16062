#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "sobograph/types.hpp"

namespace sobograph {

/// Base class for every error raised by the library. `exit_code()` follows the
/// CLI convention: 1 I/O or parse, 2 validation, 3 assumption violation,
/// 4 numeric precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Raised when two distinct parent edges reach `node` with equal path length,
/// i.e. the root does not have unique shortest paths.
class AmbiguousPathError : public Error {
 public:
  AmbiguousPathError(NodeId node, EdgeId first, EdgeId second)
      : Error("ambiguous shortest path to node " + std::to_string(node) +
              " (tight edges " + std::to_string(first) + " and " +
              std::to_string(second) + ")"),
        node_(node),
        first_(first),
        second_(second) {}
  int exit_code() const noexcept override { return 3; }
  NodeId node() const noexcept { return node_; }
  EdgeId first_edge() const noexcept { return first_; }
  EdgeId second_edge() const noexcept { return second_; }

 private:
  NodeId node_;
  EdgeId first_;
  EdgeId second_;
};

class EmptyRootSetError : public Error {
 public:
  EmptyRootSetError() : Error("no unique-path root node") {}
  int exit_code() const noexcept override { return 2; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// The profile handed to measure reconstruction violates the convex-set
/// constraints (some reconstructed mass is negative).
class KNotSatisfied : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace sobograph
