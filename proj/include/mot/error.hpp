#pragma once

#include <stdexcept>
#include <string>

namespace mot {

enum class ErrorKind {
    InvalidDimensions,
    DegenerateDensity,
    InsufficientStrikes,
    ZeroMass,
    NoConvergence,
    Assembly,
    LinearSolver,
    Validation,
    Parse,
    Io,
    EmptyMask,
    Numeric,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Input / validation problems (as opposed to numerical breakdown).
    bool is_input_error() const noexcept {
        switch (kind_) {
        case ErrorKind::InvalidDimensions:
        case ErrorKind::DegenerateDensity:
        case ErrorKind::InsufficientStrikes:
        case ErrorKind::ZeroMass:
        case ErrorKind::Validation:
        case ErrorKind::Parse:
        case ErrorKind::Io:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

} // namespace mot
