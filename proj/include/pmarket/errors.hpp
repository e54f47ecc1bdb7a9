#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmarket {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (bad index, wrong behavior kind, size mismatch).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A utility agent was asked to price against a zero price on one of its goods.
class SingularPriceError : public Error {
public:
    using Error::Error;
};

/// Betting agents reached a solver that clears by excess demand (or vice versa).
class WrongClearingRuleError : public Error {
public:
    using Error::Error;
};

/// The market has no closed-form equilibrium; use a numeric solver.
class UnsupportedAnalyticError : public Error {
public:
    using Error::Error;
};

/// Every agent assigned zero probability to the realized outcome.
class DegeneratePriceError : public Error {
public:
    DegeneratePriceError(std::size_t step, const std::string& what)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Data annihilates every agent (posterior mass zero everywhere).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Input text could not be turned into a market or dataset. `where` names
/// the line and/or field path.
class ParseError : public Error {
public:
    ParseError(std::string where, const std::string& what)
        : Error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace pmarket
