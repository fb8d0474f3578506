#pragma once

#include <stdexcept>
#include <string>

namespace gexpect {

/// Bad inputs or broken construction invariants (CLI exit code 2).
class validation_error : public std::runtime_error {
  public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Failures of the numerical machinery itself: CFL violations,
/// state-cap overflows and the like (CLI exit code 1).
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gexpect
