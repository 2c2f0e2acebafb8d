#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapfsplit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a graph, vertex or instance argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed map / scenario / JSON text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An instance violates its invariants (blocked endpoint, duplicate start...).
class ValidationError : public Error {
 public:
  ValidationError(std::size_t robot, const std::string& what)
      : Error("robot " + std::to_string(robot) + ": " + what), robot_(robot) {}

  std::size_t robot() const noexcept { return robot_; }

 private:
  std::size_t robot_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// No path exists at all between two vertices.
class NoPathError : public Error {
 public:
  using Error::Error;
};

/// A path may exist, but not within the search's horizon cap.
class HorizonExceededError : public NoPathError {
 public:
  using NoPathError::NoPathError;
};

/// A wall-clock or node budget ran out.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class ConcatenationError : public Error {
 public:
  ConcatenationError(std::size_t boundary, std::size_t robot,
                     const std::string& what)
      : Error("boundary " + std::to_string(boundary) + ", robot " +
              std::to_string(robot) + ": " + what),
        boundary_(boundary),
        robot_(robot) {}

  std::size_t boundary() const noexcept { return boundary_; }
  std::size_t robot() const noexcept { return robot_; }

 private:
  std::size_t boundary_;
  std::size_t robot_;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapfsplit
