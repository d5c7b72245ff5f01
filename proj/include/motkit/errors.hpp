#pragma once

#include <stdexcept>
#include <string>

namespace motkit {

// Raised for malformed input files; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A metric whose denominator is empty (e.g. no ground-truth objects) is
// reported as absent, never as zero.
class UndefinedMetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace motkit
