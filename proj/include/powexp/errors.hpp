#pragma once

#include <stdexcept>
#include <string>

namespace powexp {

/// Error categories surfaced by the library. The CLI maps every category
/// except `Io` to exit status 1.
enum class ErrorCode {
    Domain,              // argument outside the mathematical domain
    Numeric,             // iterative solver failed to converge
    TailProvisoViolated, // truncation cutoff lies on the wrong side of beta
    RootsNotRealPositive,
    WeightsNotPositive,
    IllConditioned,
    PreconditionStep,    // a time step is shorter than the kernel's delta
    PreconditionHorizon, // the grid extends beyond the kernel's T
    InvalidSum,          // ExpSum invariant violated
    Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace powexp
