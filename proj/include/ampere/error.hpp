#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ampere {

enum class ErrorKind {
    InvalidArgument,
    ParamOutOfRange,
    DegeneratePatch,
    DegenerateIntersection,
    NonTransversal,
    NoConvergence,
    NearSingular,
    CurvesTooClose,
    NotUnit,
    DegenerateBase,
    SceneError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Numerical failures are the ones a caller can recover from by changing
/// geometry or tolerances; everything else is a usage problem.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

}  // namespace ampere
