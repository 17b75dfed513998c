#pragma once

#include <stdexcept>
#include <string>

namespace gridrisk {

/// Input text that cannot be tokenized or violates the file grammar.
/// Carries the 1-based line/column of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

/// Well-formed input whose content is inconsistent: dangling references,
/// mismatched archive headers, corrupt records, contract misuse.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerics gave up: singular island system, solver iteration limit.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gridrisk
