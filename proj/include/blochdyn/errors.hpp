#pragma once

#include <stdexcept>
#include <string>

namespace blochdyn {

/// Bad arguments: out-of-zone k, truncation smaller than the potential cutoff,
/// unknown dimension tags, non-Hermitian coefficient sets.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed scenario file. Carries line/column when the JSON itself is broken.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// The numerics hit a physically ill-posed point.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Band tracking across a finite-difference stencil could not identify the band.
class DegeneratePointError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Band curvature vanishes; effective mass undefined.
class InfiniteMassError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Wavepacket got within 5 sigma of the grid edge.
class BoundaryError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

class EigenSolverError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// Energy drift in a conservative integration exceeded the diagnostic limit.
class EnergyDriftError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

}  // namespace blochdyn
