#pragma once

#include <stdexcept>
#include <string>

namespace smoothcontact {

// Raised when an energy is evaluated at an infeasible point (penetration,
// element inversion, IMLS query out of support). The line search treats
// these as a signal to shrink the step.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace smoothcontact
