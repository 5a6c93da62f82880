#pragma once

#include <stdexcept>
#include <string>

namespace srslab {

// Error taxonomy mirrors the CLI exit-code contract:
//   InputError -> 2, NumericError -> 3, ConfigError -> 4.

struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace srslab
