#pragma once

#include <stdexcept>
#include <string>

namespace kobalab {

// Error taxonomy mirrors the CLI exit codes: configuration problems,
// bad arguments (including out-of-chart queries) and numerical
// non-convergence are kept distinct so the front end can map them.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfChartError : ArgumentError {
    explicit OutOfChartError(const std::string& what) : ArgumentError(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what, std::string diag = {})
        : std::runtime_error(diag.empty() ? what : what + " [" + diag + "]"),
          diagnostics(std::move(diag)) {}
    std::string diagnostics;
};

}  // namespace kobalab
