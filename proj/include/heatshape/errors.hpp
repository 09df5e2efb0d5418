#pragma once

#include <stdexcept>
#include <string>

namespace heatshape {

/// A caller broke a documented precondition (point off the circle,
/// mismatched mesh/grid, ...).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// No admissible disc position exists, or a disc leaves the unit square.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Linear solver breakdown (factorization failure, non-finite iterate).
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace heatshape
