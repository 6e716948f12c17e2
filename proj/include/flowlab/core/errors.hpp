#pragma once

#include <stdexcept>
#include <string>

namespace flowlab {

/// Base class for all failures the library reports deliberately.
struct FlowError : std::runtime_error {
    explicit FlowError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Metric argument is not symmetric positive definite.
struct InvalidMetric : FlowError {
    explicit InvalidMetric(const std::string& msg) : FlowError(msg) {}
};

/// (g, J) pair violates the compatibility conditions; carries the defect norm.
struct CompatibilityError : FlowError {
    double defect;
    CompatibilityError(const std::string& msg, double d) : FlowError(msg), defect(d) {}
};

/// Curvature form has a non-positive component; no positive volume form exists.
struct NotFano : FlowError {
    explicit NotFano(const std::string& msg) : FlowError(msg) {}
};

/// Time integration produced NaN or a defect above the divergence tolerance.
struct DivergenceError : FlowError {
    double time;
    DivergenceError(const std::string& msg, double t) : FlowError(msg), time(t) {}
};

/// Evolving metric lost positive definiteness.
struct PositivityLoss : FlowError {
    double time;
    PositivityLoss(const std::string& msg, double t) : FlowError(msg), time(t) {}
};

/// Gauge map stopped being monotone.
struct GaugeFoldError : FlowError {
    double time;
    GaugeFoldError(const std::string& msg, double t) : FlowError(msg), time(t) {}
};

/// A cross-check identity drifted past its tolerance.
struct ConsistencyError : FlowError {
    explicit ConsistencyError(const std::string& msg) : FlowError(msg) {}
};

/// Malformed configuration text.
struct ParseError : FlowError {
    explicit ParseError(const std::string& msg) : FlowError(msg) {}
};

/// Well-formed configuration with an invalid value; names the key.
struct ConfigError : FlowError {
    std::string key;
    ConfigError(const std::string& k, const std::string& msg) : FlowError(msg), key(k) {}
};

/// Filesystem failure while emitting artifacts.
struct IoError : FlowError {
    explicit IoError(const std::string& msg) : FlowError(msg) {}
};

} // namespace flowlab
