#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scnpp/errors.hpp"
#include "scnpp/linops.hpp"
#include "scnpp/mappings.hpp"

namespace scnpp {

/// An SCNPP(p, r) instance: find x with 0 in every B_i(x) and 0 in every
/// F_j(A_j x).
struct ScnppInstance {
    Eigen::Index n1 = 0;                     // dimension of the primal space
    std::vector<MonotoneMap> b_maps;         // p mappings on the primal space
    std::vector<MonotoneMap> f_maps;         // r mappings on the image spaces
    std::vector<LinearOp> a_ops;             // r operators, m_j x n1
    std::optional<Vector> certified_solution;
    std::optional<bool> certified_empty;     // advisory: solution set known empty

    int p() const { return static_cast<int>(b_maps.size()); }
    int r() const { return static_cast<int>(f_maps.size()); }
};

/// max_i ||x - J^{B_i}(x)||.
inline double primal_residual(const ScnppInstance& inst, const ResolventParams& params,
                              const Vector& x) {
    double res = 0.0;
    for (const auto& b : inst.b_maps)
        res = std::max(res, fixed_point_residual(b, params, x));
    return res;
}

/// max_j ||A_j x - J^{F_j}(A_j x)||.
inline double image_residual(const ScnppInstance& inst, const ResolventParams& params,
                             const Vector& x) {
    double res = 0.0;
    for (int j = 0; j < inst.r(); ++j)
        res = std::max(res, fixed_point_residual(inst.f_maps[j], params, inst.a_ops[j].apply(x)));
    return res;
}

inline constexpr double kCertificationTol = 1e-9;

/// Checks every structural invariant and aggregates all violations; an empty
/// result means the instance is valid.
inline std::vector<std::string> validate(const ScnppInstance& inst) {
    std::vector<std::string> out;
    if (inst.n1 <= 0) out.push_back("instance: n1 must be positive");
    if (inst.b_maps.empty() && inst.f_maps.empty())
        out.push_back("instance: vacuous problem (p = 0 and r = 0)");
    if (inst.a_ops.size() != inst.f_maps.size())
        out.push_back("instance: operators.a count (" + std::to_string(inst.a_ops.size()) +
                      ") must match mappings.f count (" + std::to_string(inst.f_maps.size()) + ")");

    for (size_t i = 0; i < inst.b_maps.size(); ++i) {
        const std::string where = "mappings.b[" + std::to_string(i) + "]";
        append_map_violations(inst.b_maps[i], where, out);
        auto d = ambient_dim(inst.b_maps[i]);
        if (d && *d != inst.n1)
            out.push_back(where + ": ambient dim " + std::to_string(*d) + " != n1 " +
                          std::to_string(inst.n1));
    }
    for (size_t j = 0; j < inst.f_maps.size(); ++j) {
        const std::string where = "mappings.f[" + std::to_string(j) + "]";
        append_map_violations(inst.f_maps[j], where, out);
        if (j < inst.a_ops.size()) {
            const auto& A = inst.a_ops[j];
            if (A.cols() != inst.n1)
                out.push_back("operators.a[" + std::to_string(j) + "]: cols " +
                              std::to_string(A.cols()) + " != n1 " + std::to_string(inst.n1));
            auto d = ambient_dim(inst.f_maps[j]);
            if (d && *d != A.rows())
                out.push_back("operators.a[" + std::to_string(j) + "]: rows " +
                              std::to_string(A.rows()) + " != mapping dim " + std::to_string(*d));
        }
    }

    if (inst.certified_solution) {
        if (inst.certified_solution->size() != inst.n1) {
            out.push_back("certified_solution: dimension mismatch");
        } else if (out.empty()) {
            ResolventParams params;  // certification uses default lambda = 1
            double pr = primal_residual(inst, params, *inst.certified_solution);
            double ir = image_residual(inst, params, *inst.certified_solution);
            if (std::max(pr, ir) > kCertificationTol)
                out.push_back("certified_solution: residuals at the certified point exceed " +
                              std::to_string(kCertificationTol) + " (primal " + std::to_string(pr) +
                              ", image " + std::to_string(ir) + ")");
        }
    }
    return out;
}

inline ScnppInstance validated(ScnppInstance inst) {
    auto violations = validate(inst);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return inst;
}

/// Product-space lift: a (p, r) instance becomes a (1, 1) instance whose
/// B-mapping is Zero, whose F-mapping applies all component resolvents
/// blockwise, and whose operator stacks p identities atop the A_j.
inline ScnppInstance lift_to_product(const ScnppInstance& inst) {
    auto violations = validate(inst);
    if (!violations.empty()) throw ValidationError(std::move(violations));

    ProductMap product;
    bool all_odd = true;
    for (const auto& b : inst.b_maps) {
        product.components.push_back(b);
        product.dims.push_back(inst.n1);
        all_odd = all_odd && b.odd;
    }
    for (size_t j = 0; j < inst.f_maps.size(); ++j) {
        product.components.push_back(inst.f_maps[j]);
        product.dims.push_back(inst.a_ops[j].rows());
        all_odd = all_odd && inst.f_maps[j].odd;
    }

    ScnppInstance lifted;
    lifted.n1 = inst.n1;
    lifted.b_maps = {MonotoneMap{ZeroMap{}, true}};
    lifted.f_maps = {MonotoneMap{std::move(product), all_odd}};
    lifted.a_ops = {lift_operator(inst.p(), inst.a_ops, inst.n1)};
    lifted.certified_solution = inst.certified_solution;
    lifted.certified_empty = inst.certified_empty;
    return lifted;
}

/// SVIP reduction: B_1 is the monotone-VI mapping G v + c + N_C(v); its null
/// points are the solutions of the variational inequality over C.
inline ScnppInstance svip_instance(const LinearOp& G, const Vector& c, const SetDescriptor& C,
                                   MonotoneMap f_side, const LinearOp& A,
                                   std::optional<Vector> certified = std::nullopt) {
    ScnppInstance inst;
    inst.n1 = G.cols();
    inst.b_maps = {MonotoneMap{AffineVIMap{G, c, C}, false}};
    inst.f_maps = {std::move(f_side)};
    inst.a_ops = {A};
    inst.certified_solution = std::move(certified);
    return validated(std::move(inst));
}

/// Split-feasibility reduction: wrap each set in its normal-cone mapping, so
/// the null points are exactly the feasibility solutions.
inline ScnppInstance feasibility_instance(const std::vector<SetDescriptor>& sets_c,
                                          const std::vector<SetDescriptor>& sets_q,
                                          std::vector<LinearOp> a_ops, Eigen::Index n1,
                                          std::optional<Vector> certified = std::nullopt,
                                          std::optional<bool> certified_empty = std::nullopt) {
    ScnppInstance inst;
    inst.n1 = n1;
    for (const auto& c : sets_c) inst.b_maps.push_back(MonotoneMap{NormalConeMap{c}, false});
    for (const auto& q : sets_q) inst.f_maps.push_back(MonotoneMap{NormalConeMap{q}, false});
    inst.a_ops = std::move(a_ops);
    inst.certified_solution = std::move(certified);
    inst.certified_empty = certified_empty;
    return validated(std::move(inst));
}

}  // namespace scnpp
