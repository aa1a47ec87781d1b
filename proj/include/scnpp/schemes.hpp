#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scnpp/errors.hpp"
#include "scnpp/linops.hpp"
#include "scnpp/mappings.hpp"
#include "scnpp/problems.hpp"

namespace scnpp {

enum class Algorithm { ForwardBackward, ProductSpace, Halpern, Haugazeau };

/// alpha_k = 1/(k+1): the classical anchoring weights.
struct HarmonicSchedule {};

/// alpha_k = (k+1)^{-q} with q in (0, 1]; still satisfies lim alpha_k = 0
/// and sum alpha_k = infinity.
struct PowerLawSchedule {
    double exponent = 1.0;
};

using AlphaSchedule = std::variant<HarmonicSchedule, PowerLawSchedule>;

inline double alpha_at(const AlphaSchedule& s, int k) {
    return std::visit(
        [k](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HarmonicSchedule>)
                return 1.0 / static_cast<double>(k + 1);
            else
                return std::pow(static_cast<double>(k + 1), -v.exponent);
        },
        s);
}

struct SolverConfig {
    Algorithm algorithm = Algorithm::ForwardBackward;
    double lambda = 1.0;
    std::optional<double> gamma;          // nullopt: auto, gamma_fraction * 2 / L_safe
    double gamma_fraction = 0.5;
    AlphaSchedule alpha_schedule = HarmonicSchedule{};
    std::optional<double> relaxation_c;   // forward-backward only; unrelaxed when unset
    double tol = 1e-8;
    int max_iter = 100000;
    std::optional<int> record_every;      // default: every iterate up to 1000, then every 10th
    double inner_tol = 1e-12;
    int inner_max_iter = 10000;

    ResolventParams resolvent_params() const { return {lambda, inner_tol, inner_max_iter}; }
};

enum class RunStatus { Converged, MaxIterReached, Breakdown };

struct ResidualRow {
    int k = 0;
    double primal_residual = 0.0;
    double image_residual = 0.0;
    double step_norm = 0.0;  // ||x^{k+1} - x^k||; 0 on the terminal row
};

struct RunTrace {
    std::vector<std::pair<int, Vector>> iterates_recorded;
    std::vector<ResidualRow> residual_history;
    RunStatus status = RunStatus::MaxIterReached;
    std::string breakdown_reason;
    Vector final_point;
    int iterations_used = 0;
};

/// The safety-margined L for the selected algorithm: ||A*A|| for the
/// two-mapping schemes, p + sum_j ||A_j||^2 for the product-space scheme.
inline double step_bound(const ScnppInstance& inst, Algorithm algorithm) {
    if (algorithm == Algorithm::ProductSpace) {
        double l = static_cast<double>(inst.p());
        for (const auto& A : inst.a_ops) l += l_safe(gram_norm(A).value);
        return l;
    }
    if (inst.p() != 1 || inst.r() != 1)
        throw ConfigError("this algorithm requires p = r = 1; lift the instance first");
    return l_safe(gram_norm(inst.a_ops[0]).value);
}

/// Validates an explicit gamma against (0, 2/L_safe) or resolves the Auto
/// default; throws ConfigError before any iteration on violation.
inline double resolve_gamma(const ScnppInstance& inst, const SolverConfig& cfg) {
    const double l = step_bound(inst, cfg.algorithm);
    if (cfg.gamma) {
        const double g = *cfg.gamma;
        if (!(g > 0.0)) throw ConfigError("gamma must be positive");
        if (l > 0.0 && g >= 2.0 / l)
            throw ConfigError("gamma " + std::to_string(g) + " violates the bound (0, 2/L) with L_safe = " +
                              std::to_string(l));
        return g;
    }
    if (!(cfg.gamma_fraction > 0.0 && cfg.gamma_fraction < 1.0))
        throw ConfigError("gamma_fraction must lie in (0, 1)");
    if (l == 0.0) return 1.0;  // A = 0: the correction term vanishes for any gamma
    return cfg.gamma_fraction * 2.0 / l;
}

/// One unrelaxed step x -> J^{B_1}(x - gamma A*(Ax - J^{F_1}(Ax))).
inline Vector fb_step(const ScnppInstance& inst, const ResolventParams& params, double gamma,
                      const Vector& x) {
    const LinearOp& A = inst.a_ops[0];
    Vector ax = A.apply(x);
    Vector correction = A.adjoint_apply(ax - resolve(inst.f_maps[0], params, ax));
    return resolve(inst.b_maps[0], params, x - gamma * correction);
}

/// One step of the product-space scheme on the original variables.
inline Vector product_step(const ScnppInstance& inst, const ResolventParams& params, double gamma,
                           const Vector& x) {
    Vector sum = Vector::Zero(x.size());
    for (const auto& b : inst.b_maps) sum += resolve(b, params, x) - x;
    for (int j = 0; j < inst.r(); ++j) {
        Vector ax = inst.a_ops[j].apply(x);
        sum += inst.a_ops[j].adjoint_apply(resolve(inst.f_maps[j], params, ax) - ax);
    }
    return x + gamma * sum;
}

/// alpha_k x^0 + (1 - alpha_k) fb_step(x).
inline Vector halpern_step(const ScnppInstance& inst, const ResolventParams& params, double gamma,
                           double alpha_k, const Vector& x0, const Vector& x) {
    return alpha_k * x0 + (1.0 - alpha_k) * fb_step(inst, params, gamma, x);
}

/// c x + (1 - c) S(x): the Browder-Petryshyn relaxation.
inline Vector relax(double c, const Vector& s_output, const Vector& x) {
    return c * x + (1.0 - c) * s_output;
}

/// Projection of x onto H(x,y) with H(y,z), in closed form. The case
/// rho = 0 with pi < 0 (inconsistent halfspaces) is not covered by the
/// formula and surfaces as a Breakdown.
inline Vector haugazeau_T(const Vector& x, const Vector& y, const Vector& z) {
    const Vector xy = x - y;
    const Vector zy = z - y;
    const double pi = xy.dot(-zy);  // <x-y, y-z>
    const double mu = xy.squaredNorm();
    const double nu = zy.squaredNorm();
    const double rho = mu * nu - pi * pi;

    // rho is a Gram determinant, ill-conditioned near collinearity
    const double rho_tol = 1e-14 * std::max(1.0, mu * nu);
    const double pi_tol = 1e-12 * std::max(1.0, std::sqrt(mu * nu));

    if (rho <= rho_tol) {
        if (pi >= -pi_tol) return z;
        throw BreakdownError("inconsistent halfspaces");
    }
    if (pi * nu >= rho) return x + (1.0 + pi / nu) * zy;
    return y + (nu / rho) * (pi * xy + mu * zy);
}

/// x -> T(x^0, x, S_{1/2}(x)) with S_{1/2} = (I + S)/2, S the
/// forward-backward operator.
inline Vector haugazeau_step(const ScnppInstance& inst, const ResolventParams& params,
                             double gamma, const Vector& x0, const Vector& x) {
    Vector half = relax(0.5, fb_step(inst, params, gamma, x), x);
    return haugazeau_T(x0, x, half);
}

namespace detail {

inline bool should_record(const SolverConfig& cfg, int k) {
    if (cfg.record_every) return k % *cfg.record_every == 0;
    return k < 1000 || k % 10 == 0;
}

}  // namespace detail

/// Iterates the selected scheme from x0 until both null-point residuals fall
/// below tol or max_iter is reached.
inline RunTrace run(const ScnppInstance& inst, const SolverConfig& cfg, const Vector& x0) {
    if (x0.size() != inst.n1)
        throw DimensionError("run: start point dim " + std::to_string(x0.size()) + " != n1 " +
                             std::to_string(inst.n1));
    if (!(cfg.lambda > 0)) throw ConfigError("lambda must be positive");
    if (!(cfg.tol > 0)) throw ConfigError("tol must be positive");
    if (cfg.max_iter <= 0) throw ConfigError("max_iter must be positive");
    if (cfg.record_every && *cfg.record_every <= 0)
        throw ConfigError("record_every must be positive");
    if (cfg.relaxation_c && !(*cfg.relaxation_c > 0.0 && *cfg.relaxation_c < 1.0))
        throw ConfigError("relaxation_c must lie in (0, 1)");
    if (const auto* pl = std::get_if<PowerLawSchedule>(&cfg.alpha_schedule);
        pl && !(pl->exponent > 0.0 && pl->exponent <= 1.0))
        throw ConfigError("power-law exponent must lie in (0, 1]");
    const double gamma = resolve_gamma(inst, cfg);
    const ResolventParams params = cfg.resolvent_params();

    RunTrace trace;
    Vector x = x0;
    for (int k = 0;; ++k) {
        const double pr = primal_residual(inst, params, x);
        const double ir = image_residual(inst, params, x);
        const bool done = std::max(pr, ir) <= cfg.tol;
        if (done || k >= cfg.max_iter) {
            trace.residual_history.push_back({k, pr, ir, 0.0});
            trace.iterates_recorded.emplace_back(k, x);
            trace.status = done ? RunStatus::Converged : RunStatus::MaxIterReached;
            trace.final_point = x;
            trace.iterations_used = k;
            return trace;
        }

        Vector next;
        try {
            switch (cfg.algorithm) {
                case Algorithm::ForwardBackward:
                    next = fb_step(inst, params, gamma, x);
                    if (cfg.relaxation_c) next = relax(*cfg.relaxation_c, next, x);
                    break;
                case Algorithm::ProductSpace:
                    next = product_step(inst, params, gamma, x);
                    break;
                case Algorithm::Halpern:
                    next = halpern_step(inst, params, gamma, alpha_at(cfg.alpha_schedule, k), x0, x);
                    break;
                case Algorithm::Haugazeau:
                    next = haugazeau_step(inst, params, gamma, x0, x);
                    break;
            }
        } catch (const BreakdownError& e) {
            trace.residual_history.push_back({k, pr, ir, 0.0});
            trace.iterates_recorded.emplace_back(k, x);
            trace.status = RunStatus::Breakdown;
            trace.breakdown_reason = e.reason();
            trace.final_point = x;
            trace.iterations_used = k;
            return trace;
        }

        if (detail::should_record(cfg, k)) {
            trace.residual_history.push_back({k, pr, ir, (next - x).norm()});
            trace.iterates_recorded.emplace_back(k, x);
        }
        x = std::move(next);
    }
}

}  // namespace scnpp
