#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scnpp/errors.hpp"

namespace scnpp {

using Vector = Eigen::VectorXd;

/// Dense bounded linear operator with adjoint (the transpose).
struct LinearOp {
    Eigen::MatrixXd mat;

    LinearOp() = default;
    explicit LinearOp(Eigen::MatrixXd m) : mat(std::move(m)) {}

    Eigen::Index rows() const { return mat.rows(); }
    Eigen::Index cols() const { return mat.cols(); }

    Vector apply(const Vector& x) const {
        if (x.size() != mat.cols())
            throw DimensionError("apply: vector dim " + std::to_string(x.size()) +
                                 " does not match operator cols " + std::to_string(mat.cols()));
        return mat * x;
    }

    Vector adjoint_apply(const Vector& y) const {
        if (y.size() != mat.rows())
            throw DimensionError("adjoint_apply: vector dim " + std::to_string(y.size()) +
                                 " does not match operator rows " + std::to_string(mat.rows()));
        return mat.transpose() * y;
    }

    static LinearOp identity(Eigen::Index n) {
        return LinearOp(Eigen::MatrixXd::Identity(n, n));
    }
};

/// Estimate of the largest eigenvalue of A*A (i.e. ||A||^2).
struct GramNormResult {
    double value = 0.0;
    bool converged = true;  // false: max_iter exhausted, value is the last estimate
    int iterations = 0;
};

inline constexpr double kGramNormTol = 1e-10;
inline constexpr int kGramNormMaxIter = 5000;

/// Safety margin applied to power-iteration estimates before they enter a
/// step-size bound; Rayleigh quotients are lower bounds on the true norm.
inline constexpr double kNormSafetyFactor = 1.01;

/// Power iteration on A*A from a deterministic start vector. The returned
/// value is a lower bound on ||A*A||; callers computing step sizes must apply
/// the safety margin (see l_safe).
inline GramNormResult gram_norm(const LinearOp& A, double tol = kGramNormTol,
                                int max_iter = kGramNormMaxIter) {
    const Eigen::Index n = A.cols();
    if (n == 0 || A.rows() == 0 || A.mat.isZero(0.0)) return {0.0, true, 0};

    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double estimate = 0.0;
    for (int k = 1; k <= max_iter; ++k) {
        Vector w = A.mat.transpose() * (A.mat * v);
        double wnorm = w.norm();
        if (wnorm < 1e-30) {
            // breakdown: v is (numerically) in the null space of A*A;
            // perturb deterministically and restart the sweep
            for (Eigen::Index i = 0; i < n; ++i)
                v[i] += 1.0 / static_cast<double>(i + 2);
            v.normalize();
            continue;
        }
        double rayleigh = v.dot(w);  // v is unit, so this is the Rayleigh quotient
        v = w / wnorm;
        double change = std::abs(rayleigh - estimate);
        estimate = rayleigh;
        if (change <= tol * std::max(1.0, std::abs(estimate)))
            return {estimate, true, k};
    }
    return {estimate, false, max_iter};
}

/// L with the margin that keeps explicit step sizes strictly inside (0, 2/L).
inline double l_safe(double l_estimate) { return l_estimate * kNormSafetyFactor; }

/// Stacked operator x -> (x, ..., x, A_1 x, ..., A_r x): p identity blocks
/// atop the A_j blocks.
inline LinearOp lift_operator(int p, const std::vector<LinearOp>& ops) {
    if (p < 0) throw ValidationError({"lift_operator: p must be nonnegative"});
    Eigen::Index n = -1;
    for (const auto& op : ops) {
        if (n < 0) n = op.cols();
        if (op.cols() != n)
            throw ValidationError({"lift_operator: inconsistent column counts"});
    }
    if (n < 0) {
        if (p == 0) throw ValidationError({"lift_operator: empty lift (p = 0, no operators)"});
        // no operators: column count is unknown without p identity blocks of
        // some dimension; caller must supply it via ops or use identity(n)
        throw ValidationError({"lift_operator: column count undetermined, pass n explicitly"});
    }
    Eigen::Index total_rows = p * n;
    for (const auto& op : ops) total_rows += op.rows();
    Eigen::MatrixXd m(total_rows, n);
    Eigen::Index row = 0;
    for (int i = 0; i < p; ++i) {
        m.block(row, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
        row += n;
    }
    for (const auto& op : ops) {
        m.block(row, 0, op.rows(), n) = op.mat;
        row += op.rows();
    }
    return LinearOp(std::move(m));
}

/// Overload for when the column count cannot be inferred from ops (r = 0).
inline LinearOp lift_operator(int p, const std::vector<LinearOp>& ops, Eigen::Index n) {
    if (!ops.empty()) {
        for (const auto& op : ops)
            if (op.cols() != n)
                throw ValidationError({"lift_operator: inconsistent column counts"});
        return lift_operator(p, ops);
    }
    if (p <= 0) throw ValidationError({"lift_operator: empty lift (p = 0, no operators)"});
    Eigen::Index total_rows = p * n;
    Eigen::MatrixXd m(total_rows, n);
    for (int i = 0; i < p; ++i)
        m.block(i * n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
    return LinearOp(std::move(m));
}

}  // namespace scnpp
