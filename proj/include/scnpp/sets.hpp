#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "scnpp/errors.hpp"
#include "scnpp/linops.hpp"

namespace scnpp {

// Closed convex set descriptors. Boxes require finite bounds; unbounded
// directions are expressed through halfspaces or affine sets.

struct BoxSet {
    Vector lo, hi;  // lo <= hi componentwise; lo == hi is a singleton
};

struct BallSet {
    Vector center;
    double radius = 1.0;
};

struct HalfspaceSet {
    Vector a;  // a != 0
    double b = 0.0;  // {x : <a,x> <= b}
};

struct AffineSet {
    LinearOp E;
    Vector d;  // {x : E x = d}, consistent system
};

using SetDescriptor = std::variant<BoxSet, BallSet, HalfspaceSet, AffineSet>;

inline Eigen::Index set_dim(const SetDescriptor& s) {
    return std::visit(
        [](const auto& v) -> Eigen::Index {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BoxSet>) return v.lo.size();
            else if constexpr (std::is_same_v<T, BallSet>) return v.center.size();
            else if constexpr (std::is_same_v<T, HalfspaceSet>) return v.a.size();
            else return v.E.cols();
        },
        s);
}

inline void append_set_violations(const SetDescriptor& s, const std::string& where,
                                  std::vector<std::string>& out) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BoxSet>) {
                if (v.lo.size() != v.hi.size())
                    out.push_back(where + ": box lo/hi dimension mismatch");
                else if (((v.hi - v.lo).array() < 0).any())
                    out.push_back(where + ": box requires lo <= hi componentwise");
                if (!v.lo.allFinite() || !v.hi.allFinite())
                    out.push_back(where + ": box bounds must be finite");
            } else if constexpr (std::is_same_v<T, BallSet>) {
                if (!(v.radius > 0))
                    out.push_back(where + ": ball radius must be positive");
            } else if constexpr (std::is_same_v<T, HalfspaceSet>) {
                if (v.a.norm() == 0.0)
                    out.push_back(where + ": halfspace normal must be nonzero");
            } else {
                if (v.E.rows() != v.d.size())
                    out.push_back(where + ": affine set E/d dimension mismatch");
                else {
                    // consistency of E v = d via least-squares residual
                    Vector v0 = v.E.mat.colPivHouseholderQr().solve(v.d);
                    if ((v.E.mat * v0 - v.d).norm() > 1e-9)
                        out.push_back(where + ": affine system E v = d is inconsistent");
                }
            }
        },
        s);
}

/// Euclidean projection onto the described set.
inline Vector project_set(const SetDescriptor& s, const Vector& x) {
    return std::visit(
        [&](const auto& v) -> Vector {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BoxSet>) {
                return x.cwiseMax(v.lo).cwiseMin(v.hi);
            } else if constexpr (std::is_same_v<T, BallSet>) {
                Vector offset = x - v.center;
                double n = offset.norm();
                if (n <= v.radius) return x;
                return v.center + (v.radius / n) * offset;
            } else if constexpr (std::is_same_v<T, HalfspaceSet>) {
                double excess = v.a.dot(x) - v.b;
                if (excess <= 0) return x;
                return x - (excess / v.a.squaredNorm()) * v.a;
            } else {
                // least-norm correction: x - E^+ (E x - d)
                Vector corr = v.E.mat.completeOrthogonalDecomposition().solve(
                    Vector(v.E.mat * x - v.d));
                return x - corr;
            }
        },
        s);
}

/// True when the projection formulas are symmetric about the origin
/// (P(-x) = -P(x)), which holds exactly when the set is symmetric.
inline bool set_is_symmetric(const SetDescriptor& s) {
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BoxSet>) return (v.lo + v.hi).norm() == 0.0;
            else if constexpr (std::is_same_v<T, BallSet>) return v.center.norm() == 0.0;
            else if constexpr (std::is_same_v<T, HalfspaceSet>) return false;
            else return v.d.norm() == 0.0;
        },
        s);
}

}  // namespace scnpp
