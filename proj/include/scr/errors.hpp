#pragma once

#include <stdexcept>
#include <string>

namespace scr {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad dimensions, non-finite
// entries, out-of-range parameters, ...).
struct InvalidInput : Error {
    using Error::Error;
};

// An iterative routine ran out of budget or a computed residual exceeded
// the requested tolerance.
struct NumericalFailure : Error {
    double residual = 0.0;

    explicit NumericalFailure(const std::string& what, double res = 0.0)
        : Error(what), residual(res) {}
};

// Dataset ingestion problems; carries the offending column and line when known.
struct IngestionError : Error {
    std::string column;
    long line = -1;

    explicit IngestionError(const std::string& what, std::string col = {}, long ln = -1)
        : Error(what), column(std::move(col)), line(ln) {}
};

// A construction would require an astronomically large object (e.g. a
// dilation order that does not fit in memory or time budgets).
struct ResourceLimit : Error {
    long long computed = 0;

    explicit ResourceLimit(const std::string& what, long long value = 0)
        : Error(what), computed(value) {}
};

} // namespace scr
