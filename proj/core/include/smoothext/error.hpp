#pragma once

#include <stdexcept>
#include <string>

namespace smoothext {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Text input could not be parsed. Carries the 1-based line and offending token.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string token, const std::string& what)
        : Error("line " + std::to_string(line) + " near '" + token + "': " + what),
          line_(line), token_(std::move(token)) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string& token() const noexcept { return token_; }

private:
    std::size_t line_;
    std::string token_;
};

/// Input parsed fine but violates a structural rule (region label, index range, ...).
class SemanticError : public Error {
public:
    using Error::Error;
};

/// Cholesky met a non-positive pivot. `op` names the operator being factorized.
class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(std::string op)
        : Error("not positive definite: " + op), operator_(std::move(op)) {}

    [[nodiscard]] const std::string& op() const noexcept { return operator_; }

private:
    std::string operator_;
};

/// Contrast lies in a set where the transmission operator is not an isomorphism.
class IllPosedContrast : public Error {
public:
    using Error::Error;
};

}  // namespace smoothext
