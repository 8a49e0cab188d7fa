// error.hpp — error kinds shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace fibercat {

enum class ErrorKind {
    Dimension,       // shape/rank mismatch between operands
    Validation,      // input violates a declared precondition
    Schema,          // malformed or incomplete serialized input
    Resolution,      // sampling too coarse for the requested computation
    RefineCover,     // a patch is too large for the base-point construction
    Inconsistency,   // a forced identity failed beyond tolerance
    GaugeInvalid,    // a supplied gauge family does not satisfy its relation
    NotEquivalent,   // projections too far apart to be equivalent
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace fibercat
