#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slice {

enum class ErrorKind {
    DimensionTooSmall,
    NonpositiveExtent,
    ZOutOfRange,
    NoConvergence,
    NonpositiveDensity,
    NonpositiveTemperature,
    KindStateMismatch,
    NotVariational,
    InvalidTimeStep,
    BlowUp,
    MarkerEscape,
    SZero,
    FZero,
    NonpositiveExner,
    InvalidArgument,
    Config,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Numerical failures map to CLI exit code 2; everything else is a usage problem.
    bool is_numerical() const noexcept {
        return kind_ == ErrorKind::NoConvergence || kind_ == ErrorKind::BlowUp ||
               kind_ == ErrorKind::MarkerEscape || kind_ == ErrorKind::NonpositiveDensity ||
               kind_ == ErrorKind::NonpositiveTemperature || kind_ == ErrorKind::NonpositiveExner;
    }

private:
    ErrorKind kind_;
};

}  // namespace slice
