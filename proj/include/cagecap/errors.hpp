#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cagecap {

// Base of every error the library throws. The CLI maps subclasses onto exit codes.
class CageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public CageError {
 public:
  using CageError::CageError;
};

class TemporalOrderError : public CageError {
 public:
  using CageError::CageError;
};

// The contaminated set can no longer be enclosed inside the modelled map.
class ContainmentImpossible : public CageError {
 public:
  using CageError::CageError;
};

class InsufficientAgents : public CageError {
 public:
  InsufficientAgents(std::size_t agents, std::size_t slots)
      : CageError("insufficient agents: " + std::to_string(agents) + " agents for " +
                  std::to_string(slots) + " slots"),
        agents_(agents),
        slots_(slots) {}
  std::size_t agents() const { return agents_; }
  std::size_t slots() const { return slots_; }

 private:
  std::size_t agents_;
  std::size_t slots_;
};

class InfeasibleCover : public CageError {
 public:
  InfeasibleCover(std::size_t sample_index, const std::string& what)
      : CageError(what), sample_index_(sample_index) {}
  // Index of a sample no candidate disc can reach.
  std::size_t witness() const { return sample_index_; }

 private:
  std::size_t sample_index_;
};

class NumericError : public CageError {
 public:
  using CageError::CageError;
};

class GeometryError : public CageError {
 public:
  using CageError::CageError;
};

// Malformed input files. `line` is 1-based, 0 when not tied to a line.
class ValidationError : public CageError {
 public:
  ValidationError(const std::string& what, std::size_t line = 0)
      : CageError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public CageError {
 public:
  using CageError::CageError;
};

}  // namespace cagecap
