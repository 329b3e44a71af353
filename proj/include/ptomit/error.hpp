#ifndef PTOMIT_ERROR_HPP
#define PTOMIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ptomit {

enum class ErrorKind {
    invalid_parameter,
    lasing_threshold,
    response_singularity,
    delay_derivative_unstable,
    division_by_zero,
    not_converged,
    instability,
    usage,
    internal
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::lasing_threshold: return "lasing-threshold singularity";
    case ErrorKind::response_singularity: return "response-singularity";
    case ErrorKind::delay_derivative_unstable: return "delay-derivative-unstable";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::not_converged: return "not-converged";
    case ErrorKind::instability: return "instability";
    case ErrorKind::usage: return "usage";
    case ErrorKind::internal: return "internal-error";
    }
    return "unknown";
}

// All library failures are reported through this type; kind() lets callers
// (the CLI in particular) decide whether a point is skippable or fatal.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace ptomit

#endif // PTOMIT_ERROR_HPP
