#pragma once

#include <stdexcept>
#include <string>

namespace cwboost {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct SingularityError : Error {
    using Error::Error;
};

// A covariate column with (numerically) zero variance.
struct DegenerateColumnError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct CsvError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

}  // namespace cwboost
