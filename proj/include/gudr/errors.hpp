// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gudr {

/// Invalid argument or configuration passed to the library.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for errors raised while parsing a model expression.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public ModelError {
public:
    SyntaxError(std::size_t position, const std::string& expected, const std::string& found)
        : ModelError("syntax error at position " + std::to_string(position) + ": expected " +
                     expected + ", found " + found),
          position_(position), expected_(expected) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

class UnknownIdentifier : public ModelError {
public:
    UnknownIdentifier(std::size_t position, const std::string& name)
        : ModelError("unknown identifier '" + name + "' at position " + std::to_string(position)),
          name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ArityError : public ModelError {
public:
    ArityError(const std::string& function, std::size_t given)
        : ModelError("function '" + function + "' takes 1 argument, " + std::to_string(given) +
                     " given") {}
};

class DimensionError : public ModelError {
public:
    using ModelError::ModelError;
};

class UnknownModel : public ModelError {
public:
    explicit UnknownModel(const std::string& name)
        : ModelError("unknown built-in model '" + name + "'") {}
};

/// Non-finite intermediate or output value. Carries the offending node index.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(std::size_t node, const std::string& what)
        : std::runtime_error(what), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// A materialized buffer would exceed the configured value cap.
class MemoryBudgetExceeded : public std::runtime_error {
public:
    MemoryBudgetExceeded(std::size_t requested, std::size_t cap)
        : std::runtime_error("buffer of " + std::to_string(requested) +
                             " values exceeds the budget of " + std::to_string(cap)),
          requested_(requested), cap_(cap) {}

    std::size_t requested() const noexcept { return requested_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t requested_;
    std::size_t cap_;
};

}  // namespace gudr
