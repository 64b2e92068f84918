#pragma once

#include <stdexcept>
#include <string>

namespace cespin {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 2, PhysicsError -> 3, IoError -> 4.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct PhysicsError : std::runtime_error {
    explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cespin
