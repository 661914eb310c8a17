// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace smomp {

// Index or coordinate outside the owning space.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Operand shapes do not agree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration or parameter combination.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requested allocation exceeds the configured memory budget.
class CapacityError : public std::runtime_error {
public:
    CapacityError(const std::string& what, std::size_t required, std::size_t budget)
        : std::runtime_error(what), required_bytes(required), budget_bytes(budget) {}

    std::size_t required_bytes;
    std::size_t budget_bytes;
};

} // namespace smomp
