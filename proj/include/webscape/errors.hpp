#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace webscape {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `row()` is the 1-based data row (0 when the header
/// or the file as a whole is at fault).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error(row == 0 ? what : "row " + std::to_string(row) + ": " + what), row_(row) {}

    /// Same error with `context` (typically a file name) prepended.
    ParseError(const std::string& context, const ParseError& inner)
        : Error(context + ": " + inner.what()), row_(inner.row()) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace webscape
