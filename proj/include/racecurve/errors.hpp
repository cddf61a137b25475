#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace racecurve {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// A response probability evaluated to exactly 0 or 1.
struct NumericError : Error {
    using Error::Error;
};

struct SingularFisherError : Error {
    using Error::Error;
};

struct NonConvergenceError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

struct DuplicateNameError : Error {
    using Error::Error;
};

struct NegativeCountError : Error {
    using Error::Error;
};

struct UnknownNameError : Error {
    using Error::Error;
};

struct UndefinedOddsError : Error {
    using Error::Error;
};

struct PanelSizeError : Error {
    using Error::Error;
};

}  // namespace racecurve
