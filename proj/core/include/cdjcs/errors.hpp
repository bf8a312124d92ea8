// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdjcs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector / matrix dimensions or bit counts that do not fit the operation.
class InputShapeError : public Error {
public:
    using Error::Error;
};

// Arguments outside the mathematical domain (non-finite input, sigma <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConstructionError : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration requested beyond the configured budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// A transmit reference cell is (numerically) zero, so element-wise division is undefined.
class ZeroReferenceError : public Error {
public:
    ZeroReferenceError(std::size_t subcarrier, std::size_t symbol)
        : Error("zero transmit reference at subcarrier " + std::to_string(subcarrier) +
                ", symbol " + std::to_string(symbol) +
                " (even number of code channels?)"),
          subcarrier_(subcarrier),
          symbol_(symbol) {}

    std::size_t subcarrier() const noexcept { return subcarrier_; }
    std::size_t symbol() const noexcept { return symbol_; }

private:
    std::size_t subcarrier_;
    std::size_t symbol_;
};

// Communication channel too weak on a subcarrier for zero-forcing equalization.
class DeepFadeError : public Error {
public:
    DeepFadeError(std::size_t subcarrier, std::size_t symbol)
        : Error("deep fade at subcarrier " + std::to_string(subcarrier) + ", symbol " +
                std::to_string(symbol)),
          subcarrier_(subcarrier),
          symbol_(symbol) {}

    std::size_t subcarrier() const noexcept { return subcarrier_; }
    std::size_t symbol() const noexcept { return symbol_; }

private:
    std::size_t subcarrier_;
    std::size_t symbol_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}
    explicit ConfigError(const std::string& problem) : ConfigError(std::vector<std::string>{problem}) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "invalid configuration:";
        for (const auto& s : items) out += "\n  " + s;
        return out;
    }

    std::vector<std::string> problems_;
};

}  // namespace cdjcs
