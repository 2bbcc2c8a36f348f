#pragma once

#include <stdexcept>
#include <string>

namespace cyclone {

// Degenerate or contradictory domain input (empty training set, collinear
// hull points, ...). The CLI maps these to exit code 1; I/O and usage
// problems map to exit code 2.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cyclone
