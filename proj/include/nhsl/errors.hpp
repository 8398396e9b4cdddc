#pragma once

#include <stdexcept>
#include <string>

namespace nhsl {

// Error categories map onto distinct CLI exit codes (config 1, lattice 2,
// sparse 3, weights 4).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LatticeError : std::runtime_error {
    explicit LatticeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SparseError : std::runtime_error {
    explicit SparseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct WeightsError : std::runtime_error {
    explicit WeightsError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace nhsl
