// errors.hpp: exception types shared by the numerical modules and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace qcse {

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed (CLI exit code 3). Carries the originating module.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

} // namespace qcse
