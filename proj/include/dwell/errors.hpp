#pragma once

#include <stdexcept>
#include <string>

namespace dwell {

/// Operands live on different Fock bases.
class BasisMismatch : public std::invalid_argument {
public:
    explicit BasisMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A computed state violated a physical invariant (trace, hermiticity, positivity)
/// or an integrator could not reach its accuracy target.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dwell
