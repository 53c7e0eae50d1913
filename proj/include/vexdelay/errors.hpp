#pragma once

#include <stdexcept>
#include <string>

namespace vexdelay
{

/// Inputs that do not fit together (mismatched grids, empty grids).
class StructuralError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A value is outside the range an operation accepts.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition fails (e.g. a condition on the parameters).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// An iterative method failed to converge.
class NumericalError : public std::runtime_error
{
public:
    NumericalError(const std::string& what, double bracket_lo = 0.0, double bracket_hi = 0.0)
        : std::runtime_error(what), lo(bracket_lo), hi(bracket_hi)
    {
    }

    double lo;
    double hi;
};

/// Configuration text could not be turned into a run configuration.
class ConfigError : public std::runtime_error
{
public:
    enum class Kind { parse, range, expression, unknown_key, missing_key };

    ConfigError(Kind kind, const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(what), kind(kind), line(line), column(column)
    {
    }

    Kind kind;
    int line;
    int column;
};

}  // namespace vexdelay
