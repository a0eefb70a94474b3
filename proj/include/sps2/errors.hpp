#pragma once

#include <stdexcept>
#include <string>

namespace sps2 {

enum class ErrorKind {
    DimensionMismatch,
    ZeroForm,
    NotStandardizable,
    UnknownBlock,
    Precondition,
    NotSubset,
    NonDivisible,
    PolynomialMismatch,
    UndefinedMultiplicity,
    NonHomogeneous,
    ZeroPolynomial,
    DegreeMismatch,
    InvalidArgument,
    DegenerateSystem,
    SizeLimit,
    InconsistentProjections,
    RetryExhausted,
    InterpolationFailure,
    Parse,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace sps2
