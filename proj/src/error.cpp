#include "mot/error.hpp"

namespace mot {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidDimensions: return "invalid-dimensions";
    case ErrorKind::DegenerateDensity: return "degenerate-density";
    case ErrorKind::InsufficientStrikes: return "insufficient-strikes";
    case ErrorKind::ZeroMass: return "zero-mass";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::LinearSolver: return "linear-solver-failure";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::EmptyMask: return "empty-mask";
    case ErrorKind::Numeric: return "numeric";
    }
    return "unknown";
}

} // namespace mot
