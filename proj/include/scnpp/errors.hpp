#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scnpp {

/// Dimension mismatch between vectors, operators or mappings.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Instance or mapping data violates a structural invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& line : v) {
            if (!s.empty()) s += "\n";
            s += line;
        }
        return s;
    }

    std::vector<std::string> violations_;
};

/// Solver configuration rejected before any iteration (e.g. step size out of range).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An inner fixed-point loop failed to reach its tolerance.
class InnerIterationError : public std::runtime_error {
public:
    InnerIterationError(const std::string& what, Eigen::VectorXd last_iterate, double residual)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
    double residual() const { return residual_; }

private:
    Eigen::VectorXd last_iterate_;
    double residual_;
};

/// An iteration reached a state its update formula does not cover.
class BreakdownError : public std::runtime_error {
public:
    explicit BreakdownError(const std::string& reason)
        : std::runtime_error(reason), reason_(reason) {}

    const std::string& reason() const { return reason_; }

private:
    std::string reason_;
};

}  // namespace scnpp
