#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coxcs {

/// Broad failure class, surfaced by the CLI as a one-line category tag.
enum class ErrorCategory { io, validation, fit, config };

constexpr std::string_view to_string(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::io: return "io";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::fit: return "fit";
    case ErrorCategory::config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category)
    {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

/// Raised by the Cox solver. `kind` distinguishes a singular information
/// matrix from monotone-likelihood divergence.
class FitError : public Error
{
public:
    enum class Kind { singular, separation, numeric };

    FitError(Kind kind, const std::string& what, int coordinate = -1)
        : Error(ErrorCategory::fit, what), kind_(kind), coordinate_(coordinate)
    {}

    Kind kind() const noexcept { return kind_; }
    /// Offending coordinate (position within the fitted column list), or -1.
    int coordinate() const noexcept { return coordinate_; }

private:
    Kind kind_;
    int coordinate_;
};

} // namespace coxcs
