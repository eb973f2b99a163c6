#pragma once

#include <stdexcept>
#include <string>

namespace ertrans {

enum class ErrorKind {
    InvalidDimension,
    InvalidParameter,
    InvalidOperator,
    IntegrationDiverged,
    DegenerateModes,
    InvalidPair,
    DegenerateTransition,
    UndefinedFidelity,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidDimension: return "invalid dimension";
        case ErrorKind::InvalidParameter: return "invalid parameter";
        case ErrorKind::InvalidOperator: return "invalid operator";
        case ErrorKind::IntegrationDiverged: return "integration diverged";
        case ErrorKind::DegenerateModes: return "degenerate modes";
        case ErrorKind::InvalidPair: return "invalid level pair";
        case ErrorKind::DegenerateTransition: return "degenerate transition";
        case ErrorKind::UndefinedFidelity: return "undefined fidelity";
        case ErrorKind::Config: return "configuration error";
    }
    return "error";
}

}  // namespace ertrans
