#pragma once

#include <stdexcept>
#include <string>

namespace ltlpsi {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the task / binding-expression parser. Carries 1-based line and
// column of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// Raised when a scenario file is malformed. `field` is a slash-separated path
// into the document (e.g. "agents/0/capabilities/1/initial").
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& msg, const std::string& field)
        : Error("scenario error at '" + field + "': " + msg), field_(field) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Raised when a construction exceeds a configured resource cap (e.g. the
// automaton state cap during translation or product construction).
class ResourceLimitError : public Error {
public:
    explicit ResourceLimitError(const std::string& msg) : Error(msg) {}
};

} // namespace ltlpsi
