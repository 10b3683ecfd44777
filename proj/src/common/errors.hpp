#pragma once

#include <stdexcept>
#include <string>

namespace uniasm {

// Bad input data or configuration: maps to exit code 1 at the CLI.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Environment or numeric failures during an otherwise valid run: exit code 2.
class RuntimeFault : public std::runtime_error {
public:
    explicit RuntimeFault(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uniasm
