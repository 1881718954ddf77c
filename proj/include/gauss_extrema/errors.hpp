#pragma once

#include <stdexcept>
#include <string>

namespace gx {

// Argument outside the mathematical domain of an operation (H outside (0,1),
// corner at the origin, lambda <= 1 for a divergent integral, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Experiment configuration rejected at load time. The message carries the
// offending key path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requested computation cannot be carried out at the given size: overflow
// in the Pickands sample mean, stage length beyond the path budget, no
// feasible u, unstable moment estimate.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Broken internal guarantee, e.g. a negative circulant eigenvalue.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace gx
