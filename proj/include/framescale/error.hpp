#pragma once

#include <stdexcept>
#include <string>

namespace framescale {

// Failure categories surfaced to callers; the CLI maps all of them to exit 1.
enum class ErrorKind {
    input,          // bad arguments, malformed files, dimension mismatches
    parse,          // file does not parse under the declared format
    totality,       // family does not span the ambient space
    inconsistency,  // subspace arithmetic contradicts its preconditions
    approximation,  // residual budget for some z_n cannot be met
    invertibility,  // ||T|| >= 1, resolvent undefined
    overflow,       // a weight left the double range
    degenerate,     // frame operator numerically singular
    internal        // broken invariant inside the pipeline
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

const char* error_kind_name(ErrorKind kind) noexcept;

}  // namespace framescale
