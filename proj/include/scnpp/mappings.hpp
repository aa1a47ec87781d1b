#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "scnpp/errors.hpp"
#include "scnpp/linops.hpp"
#include "scnpp/sets.hpp"

namespace scnpp {

// A maximal monotone mapping, represented operationally by its resolvent
// J_lambda = (I + lambda B)^{-1}, which is single-valued and firmly
// nonexpansive for every lambda > 0.

struct MonotoneMap;

/// B = 0; resolvent is the identity.
struct ZeroMap {};

/// B = N_C; resolvent is the metric projection onto C for any lambda.
struct NormalConeMap {
    SetDescriptor set;
};

/// B = weight * subdifferential of the l1 norm; resolvent soft-thresholds.
struct SubdiffL1Map {
    double weight = 1.0;
};

/// B(v) = G v + c with G + G^T positive semidefinite.
struct AffineMonotoneMap {
    LinearOp G;
    Vector c;
};

/// B(v) = G v + c + N_set(v): the monotone-VI mapping over the set.
struct AffineVIMap {
    LinearOp G;
    Vector c;
    SetDescriptor set;
};

/// Blockwise product B_1 x ... x B_m; the resolvent factors exactly.
struct ProductMap {
    std::vector<MonotoneMap> components;
    std::vector<Eigen::Index> dims;  // ambient dim of each component block
};

using MapKind =
    std::variant<ZeroMap, NormalConeMap, SubdiffL1Map, AffineMonotoneMap, AffineVIMap, ProductMap>;

struct MonotoneMap {
    MapKind kind;
    bool odd = false;  // user-declared; validation rejects it for asymmetric kinds
};

struct ResolventParams {
    double lambda = 1.0;
    double inner_tol = 1e-12;
    int inner_max_iter = 10000;
};

/// Ambient dimension when the kind pins one down; Zero and SubdiffL1 act in
/// any dimension and report nullopt.
inline std::optional<Eigen::Index> ambient_dim(const MonotoneMap& m) {
    return std::visit(
        [](const auto& v) -> std::optional<Eigen::Index> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NormalConeMap>) return set_dim(v.set);
            else if constexpr (std::is_same_v<T, AffineMonotoneMap>) return v.G.cols();
            else if constexpr (std::is_same_v<T, AffineVIMap>) return v.G.cols();
            else if constexpr (std::is_same_v<T, ProductMap>) {
                Eigen::Index total = 0;
                for (auto d : v.dims) total += d;
                return total;
            } else
                return std::nullopt;
        },
        m.kind);
}

inline bool odd_flag_permitted(const MonotoneMap& m) {
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ZeroMap>) return true;
            else if constexpr (std::is_same_v<T, NormalConeMap>) {
                // only symmetric sets give odd projections, and halfspaces never do
                if (std::holds_alternative<HalfspaceSet>(v.set)) return false;
                return set_is_symmetric(v.set);
            } else if constexpr (std::is_same_v<T, SubdiffL1Map>) return true;
            else if constexpr (std::is_same_v<T, AffineMonotoneMap>)
                return v.c.norm() == 0.0;
            else if constexpr (std::is_same_v<T, ProductMap>) {
                for (const auto& c : v.components)
                    if (!c.odd) return false;
                return true;
            } else
                return false;  // AffineVI: no oddness guarantee
        },
        m.kind);
}

namespace detail {

inline void append_psd_violation(const LinearOp& G, const std::string& where,
                                 std::vector<std::string>& out) {
    if (G.rows() != G.cols()) {
        out.push_back(where + ": G must be square");
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.mat + G.mat.transpose());
    if (es.info() != Eigen::Success) {
        out.push_back(where + ": eigenvalue check of G + G^T failed");
        return;
    }
    double lambda_min = es.eigenvalues().minCoeff();
    if (lambda_min < -1e-9)
        out.push_back(where + ": G + G^T is not positive semidefinite (min eigenvalue " +
                      std::to_string(lambda_min) + ")");
}

}  // namespace detail

inline void append_map_violations(const MonotoneMap& m, const std::string& where,
                                  std::vector<std::string>& out) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NormalConeMap>) {
                append_set_violations(v.set, where, out);
            } else if constexpr (std::is_same_v<T, SubdiffL1Map>) {
                if (!(v.weight > 0)) out.push_back(where + ": l1 weight must be positive");
            } else if constexpr (std::is_same_v<T, AffineMonotoneMap>) {
                detail::append_psd_violation(v.G, where, out);
                if (v.c.size() != v.G.cols())
                    out.push_back(where + ": c dimension does not match G");
            } else if constexpr (std::is_same_v<T, AffineVIMap>) {
                detail::append_psd_violation(v.G, where, out);
                if (v.c.size() != v.G.cols())
                    out.push_back(where + ": c dimension does not match G");
                append_set_violations(v.set, where, out);
                if (set_dim(v.set) != v.G.cols())
                    out.push_back(where + ": set dimension does not match G");
            } else if constexpr (std::is_same_v<T, ProductMap>) {
                if (v.components.size() != v.dims.size())
                    out.push_back(where + ": product components/dims mismatch");
                for (size_t i = 0; i < v.components.size(); ++i) {
                    append_map_violations(v.components[i],
                                          where + ".component[" + std::to_string(i) + "]", out);
                    auto d = ambient_dim(v.components[i]);
                    if (i < v.dims.size() && d && *d != v.dims[i])
                        out.push_back(where + ": product block " + std::to_string(i) +
                                      " dimension mismatch");
                }
            }
        },
        m.kind);
    if (m.odd && !odd_flag_permitted(m))
        out.push_back(where + ": odd flag not permitted for this kind/data");
}

Vector resolve(const MonotoneMap& m, const ResolventParams& params, const Vector& x);

namespace detail {

inline Vector resolve_affine_vi(const AffineVIMap& vi, const ResolventParams& params,
                                const Vector& x) {
    const double lambda = params.lambda;
    // v -> P(x - lambda(Gv + c)) is a contraction with modulus lambda*||G||;
    // otherwise fall back to averaged iterations.
    const double g_norm = std::sqrt(gram_norm(vi.G).value);
    const bool averaged = lambda * g_norm * kNormSafetyFactor >= 1.0;
    Vector v = project_set(vi.set, x);
    double residual = 0.0;
    for (int k = 0; k < params.inner_max_iter; ++k) {
        Vector next = project_set(vi.set, x - lambda * (vi.G.mat * v + vi.c));
        residual = (v - next).norm();
        if (residual <= params.inner_tol) return next;
        v = averaged ? Vector(0.5 * v + 0.5 * next) : next;
    }
    throw InnerIterationError("AffineVI resolvent: inner iteration did not converge (residual " +
                                  std::to_string(residual) + ")",
                              v, residual);
}

}  // namespace detail

/// J_lambda(x) = (I + lambda B)^{-1}(x).
inline Vector resolve(const MonotoneMap& m, const ResolventParams& params, const Vector& x) {
    auto d = ambient_dim(m);
    if (d && *d != x.size())
        throw DimensionError("resolve: vector dim " + std::to_string(x.size()) +
                             " does not match mapping dim " + std::to_string(*d));
    return std::visit(
        [&](const auto& v) -> Vector {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ZeroMap>) {
                return x;
            } else if constexpr (std::is_same_v<T, NormalConeMap>) {
                return project_set(v.set, x);
            } else if constexpr (std::is_same_v<T, SubdiffL1Map>) {
                const double t = params.lambda * v.weight;
                return x.unaryExpr([t](double xi) {
                    return std::copysign(std::max(std::abs(xi) - t, 0.0), xi);
                });
            } else if constexpr (std::is_same_v<T, AffineMonotoneMap>) {
                const Eigen::Index n = v.G.cols();
                Eigen::MatrixXd lhs =
                    Eigen::MatrixXd::Identity(n, n) + params.lambda * v.G.mat;
                Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
                Vector rhs = x - params.lambda * v.c;
                Vector sol = lu.solve(rhs);
                if (!sol.allFinite() || (lhs * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
                    throw InnerIterationError("AffineMonotone resolvent: linear solve failed", sol,
                                              (lhs * sol - rhs).norm());
                return sol;
            } else if constexpr (std::is_same_v<T, AffineVIMap>) {
                return detail::resolve_affine_vi(v, params, x);
            } else {
                Vector out(x.size());
                Eigen::Index offset = 0;
                for (size_t i = 0; i < v.components.size(); ++i) {
                    const Eigen::Index bd = v.dims[i];
                    out.segment(offset, bd) =
                        resolve(v.components[i], params, x.segment(offset, bd));
                    offset += bd;
                }
                return out;
            }
        },
        m.kind);
}

/// ||x - J_lambda(x)||; zero exactly at the null points of the mapping.
inline double fixed_point_residual(const MonotoneMap& m, const ResolventParams& params,
                                   const Vector& x) {
    return (x - resolve(m, params, x)).norm();
}

}  // namespace scnpp
