#pragma once

#include <stdexcept>
#include <string>

namespace skewlab {

// A finite word window could not supply a requested coordinate.
struct window_error : std::runtime_error {
    explicit window_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed user input: config files, CLI arguments.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace skewlab
