#pragma once

#include <stdexcept>
#include <string>

namespace sforest {

// Precondition violation by the caller (bad ids, negative lengths, eps <= 0).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Some demand pair cannot be connected.
class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured cap (terminal count, enumeration bound, DP states) was exceeded.
class LimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace sforest
