#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace islander {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, invalid grids or partitions, refused
/// requests. The CLI maps this family to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(std::string source, std::size_t line, std::string field, const std::string& what)
        : InputError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                     (field.empty() ? "" : " [" + field + "]") + ": " + what),
          source_(std::move(source)), line_(line), field_(std::move(field)) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string source_;
    std::size_t line_;
    std::string field_;
};

class GridError : public InputError {
public:
    using InputError::InputError;
};

class PartitionError : public InputError {
public:
    using InputError::InputError;
};

/// Consensus simulation failures: divergence, iteration cap, inconsistent
/// recovery, or rates read before steady state.
class EstimatorError : public Error {
public:
    using Error::Error;
};

}  // namespace islander
