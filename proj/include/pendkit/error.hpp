#pragma once

#include <stdexcept>
#include <string>

namespace pendkit {

/// Failure categories carried by every pendkit::Error. The C API maps these
/// one-to-one onto pk_status codes.
enum class ErrorCode {
    invalid_argument,   ///< bad value, non-finite input, violated precondition
    parse,              ///< malformed CSV / config input
    singular,           ///< rank-deficient regression design
    not_stabilizable,   ///< (A,B) has an uncontrollable unstable mode
    no_convergence,     ///< iterative solver hit its iteration cap
    diverged,           ///< simulation left the validity region
    range,              ///< interpolation/alignment outside the data range
    unstable,           ///< operation requires a stable system
    io,                 ///< file could not be opened/written
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pendkit
