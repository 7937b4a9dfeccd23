#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vrpdt {

/// Malformed input text: bad JSON/CSV, wrong field types, unknown keys.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parsed fine but breaks a domain rule (e.g. a time window with open >= close).
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An upper/lower vector pair that cannot be decoded or repaired.
class EncodingError : public std::runtime_error {
public:
    EncodingError(std::size_t position, const std::string& what)
        : std::runtime_error("position " + std::to_string(position) + ": " + what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Missing, corrupt or version-mismatched travel model payload.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vrpdt
