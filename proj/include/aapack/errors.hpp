#pragma once

#include <stdexcept>
#include <string>

namespace aapack {

// Argument outside the domain of an operation (bad interval, unnormalized
// weights, pack larger than a declared maximum, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Weights that can no longer be normalized (every expert at weight zero).
class ArithmeticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input file problems. `line` is 1-based and 0 when the error is not tied to
// a single row.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          message_(what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

    /// Same error with `context` (typically a file path) prepended.
    DataError in(const std::string& context) const { return DataError(context + ": " + message_, line_); }

private:
    std::string message_;
    std::size_t line_;
};

class SchemaError : public DataError {
public:
    explicit SchemaError(const std::string& column)
        : DataError("missing column '" + column + "'"), column_(column) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

}  // namespace aapack
