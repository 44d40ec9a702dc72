#pragma once

#include <stdexcept>
#include <string>

namespace hra {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& message)
        : std::runtime_error(message) {}
};

} // namespace hra
