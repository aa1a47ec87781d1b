// scnpp: load SCNPP instances, run the iterative schemes, emit CSV traces.
//
// Exit codes: 0 converged, 2 max-iteration reached, 3 breakdown,
// 1 validation / IO / configuration error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scnpp/io.hpp"
#include "scnpp/problems.hpp"
#include "scnpp/schemes.hpp"

namespace {

using namespace scnpp;

struct CommonOpts {
    std::string instance_path;
    std::string algorithm = "fb";
    double lambda = 1.0;
    double gamma = 0.0;
    bool gamma_set = false;
    double gamma_fraction = 0.5;
    std::string alpha = "harmonic";
    double relax_c = 0.0;
    bool relax_set = false;
    double tol = 1e-8;
    int max_iter = 100000;
    int record_every = 0;
    unsigned seed = 0;
    std::string x0_spec = "zero";
    bool include_iterates = false;
};

Algorithm parse_algorithm(const std::string& name) {
    if (name == "fb") return Algorithm::ForwardBackward;
    if (name == "product") return Algorithm::ProductSpace;
    if (name == "halpern") return Algorithm::Halpern;
    if (name == "haugazeau") return Algorithm::Haugazeau;
    throw ConfigError("unknown algorithm '" + name + "' (expected fb|product|halpern|haugazeau)");
}

AlphaSchedule parse_alpha(const std::string& spec) {
    if (spec == "harmonic") return HarmonicSchedule{};
    if (spec.rfind("power:", 0) == 0) {
        double q = std::stod(spec.substr(6));
        return PowerLawSchedule{q};
    }
    throw ConfigError("unknown alpha schedule '" + spec + "' (expected harmonic|power:q)");
}

SolverConfig make_config(const CommonOpts& opts, Algorithm algorithm) {
    SolverConfig cfg;
    cfg.algorithm = algorithm;
    cfg.lambda = opts.lambda;
    if (opts.gamma_set) cfg.gamma = opts.gamma;
    cfg.gamma_fraction = opts.gamma_fraction;
    cfg.alpha_schedule = parse_alpha(opts.alpha);
    if (opts.relax_set) cfg.relaxation_c = opts.relax_c;
    cfg.tol = opts.tol;
    cfg.max_iter = opts.max_iter;
    if (opts.record_every > 0) cfg.record_every = opts.record_every;
    return cfg;
}

Vector make_start_point(const CommonOpts& opts, Eigen::Index n1) {
    if (opts.x0_spec == "zero") return Vector::Zero(n1);
    if (opts.x0_spec == "random") {
        std::mt19937 rng(opts.seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        Vector x(n1);
        for (Eigen::Index i = 0; i < n1; ++i) x[i] = dist(rng);
        return x;
    }
    std::vector<double> vals;
    std::stringstream ss(opts.x0_spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<Eigen::Index>(vals.size()) != n1)
        throw ConfigError("--x0 has " + std::to_string(vals.size()) + " entries, instance needs " +
                          std::to_string(n1));
    return Eigen::Map<Vector>(vals.data(), n1);
}

int status_exit_code(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return 0;
        case RunStatus::MaxIterReached: return 2;
        case RunStatus::Breakdown: return 3;
    }
    return 1;
}

// The two-mapping schemes need p = r = 1; anything else runs on the lift.
ScnppInstance prepare_for(const ScnppInstance& inst, Algorithm algorithm) {
    if (algorithm == Algorithm::ProductSpace) return inst;
    if (inst.p() == 1 && inst.r() == 1) return inst;
    return lift_to_product(inst);
}

struct RunOutcome {
    std::string algorithm;
    RunTrace trace;
    double final_primal = 0.0;
    double final_image = 0.0;
    std::string error;  // non-empty: the run never produced a trace
};

RunOutcome run_one(const ScnppInstance& inst, const CommonOpts& opts, const std::string& alg_name) {
    RunOutcome out;
    out.algorithm = alg_name;
    try {
        Algorithm algorithm = parse_algorithm(alg_name);
        ScnppInstance prepared = prepare_for(inst, algorithm);
        SolverConfig cfg = make_config(opts, algorithm);
        Vector x0 = make_start_point(opts, prepared.n1);
        out.trace = run(prepared, cfg, x0);
        // residuals are reported against the *original* instance
        ResolventParams params = cfg.resolvent_params();
        out.final_primal = primal_residual(inst, params, out.trace.final_point);
        out.final_image = image_residual(inst, params, out.trace.final_point);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

int cmd_validate(const std::string& path) {
    try {
        ScnppInstance inst = io::load_instance(path);
        auto violations = validate(inst);
        if (violations.empty()) {
            std::cout << "ok\n";
            return 0;
        }
        for (const auto& v : violations) std::cerr << v << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_solve(const CommonOpts& opts, const std::string& out_path) {
    ScnppInstance inst;
    try {
        inst = io::load_instance(opts.instance_path);
        auto violations = validate(inst);
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << v << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    RunOutcome outcome = run_one(inst, opts, opts.algorithm);
    if (!outcome.error.empty()) {
        std::cerr << "error: " << outcome.error << "\n";
        return 1;
    }
    if (out_path.empty()) {
        io::write_trace(std::cout, outcome.trace, opts.include_iterates);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open output file " << out_path << "\n";
            return 1;
        }
        io::write_trace(out, outcome.trace, opts.include_iterates);
    }
    return status_exit_code(outcome.trace.status);
}

int cmd_compare(const CommonOpts& opts, const std::vector<std::string>& algorithms,
                const std::string& out_dir) {
    ScnppInstance inst;
    try {
        inst = io::load_instance(opts.instance_path);
        auto violations = validate(inst);
        if (!violations.empty()) {
            for (const auto& v : violations) std::cerr << v << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    // runs are independent; execute them concurrently
    std::vector<std::future<RunOutcome>> futures;
    for (const auto& alg : algorithms)
        futures.push_back(std::async(std::launch::async,
                                     [&inst, &opts, alg] { return run_one(inst, opts, alg); }));

    int worst = 0;
    std::printf("%-12s %-12s %-14s %-14s %s\n", "algorithm", "iterations", "primal_res",
                "image_res", "status");
    for (auto& f : futures) {
        RunOutcome outcome = f.get();
        if (!outcome.error.empty()) {
            std::printf("%-12s %-12s %-14s %-14s error: %s\n", outcome.algorithm.c_str(), "-", "-",
                        "-", outcome.error.c_str());
            worst = std::max(worst, 1);
            continue;
        }
        std::printf("%-12s %-12d %-14.6e %-14.6e %s\n", outcome.algorithm.c_str(),
                    outcome.trace.iterations_used, outcome.final_primal, outcome.final_image,
                    io::status_name(outcome.trace.status));
        std::string path = out_dir + "/trace_" + outcome.algorithm + ".csv";
        std::ofstream out(path, std::ios::binary);
        if (out) io::write_trace(out, outcome.trace, opts.include_iterates);
        worst = std::max(worst, status_exit_code(outcome.trace.status));
    }
    return worst;
}

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("instance", opts.instance_path, "instance file (JSON)")->required();
    cmd->add_option("--lambda", opts.lambda, "resolvent parameter lambda");
    cmd->add_option("--gamma", opts.gamma, "explicit step size (validated against (0, 2/L_safe))")
        ->each([&opts](const std::string&) { opts.gamma_set = true; });
    cmd->add_option("--gamma-fraction", opts.gamma_fraction,
                    "auto step size as a fraction of 2/L_safe");
    cmd->add_option("--alpha", opts.alpha, "Halpern schedule: harmonic or power:q");
    cmd->add_option("--relax", opts.relax_c, "relaxation constant c in (0,1) for fb")
        ->each([&opts](const std::string&) { opts.relax_set = true; });
    cmd->add_option("--tol", opts.tol, "residual stopping tolerance");
    cmd->add_option("--max-iter", opts.max_iter, "iteration cap");
    cmd->add_option("--record-every", opts.record_every, "record every k-th iterate");
    cmd->add_option("--seed", opts.seed, "seed for randomized diagnostics (--x0 random)");
    cmd->add_option("--x0", opts.x0_spec, "start point: zero, random, or comma-separated values");
    cmd->add_flag("--iterates", opts.include_iterates, "include iterate columns in the trace");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split common null point problem solver"};
    app.require_subcommand(1);

    CommonOpts solve_opts;
    std::string solve_out;
    auto* solve = app.add_subcommand("solve", "run one algorithm and write a trace");
    add_common_flags(solve, solve_opts);
    solve->add_option("--algorithm", solve_opts.algorithm, "fb|product|halpern|haugazeau");
    solve->add_option("--out", solve_out, "trace output path (default: stdout)");

    CommonOpts compare_opts;
    std::vector<std::string> compare_algorithms = {"fb", "product", "halpern", "haugazeau"};
    std::string compare_out_dir;
    auto* compare = app.add_subcommand("compare", "run several algorithms on one instance");
    add_common_flags(compare, compare_opts);
    compare->add_option("--algorithms", compare_algorithms, "algorithms to compare")
        ->delimiter(',');
    compare->add_option("--out-dir", compare_out_dir, "directory for per-algorithm traces");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "check an instance file");
    validate_cmd->add_option("instance", validate_path, "instance file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (compare_out_dir.empty()) {
        const char* env = std::getenv("SCNPP_OUT_DIR");
        compare_out_dir = env ? env : ".";
    }

    if (*solve) return cmd_solve(solve_opts, solve_out);
    if (*compare) return cmd_compare(compare_opts, compare_algorithms, compare_out_dir);
    return cmd_validate(validate_path);
}
