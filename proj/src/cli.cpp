#include "sbmd/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbmd/analysis.hpp"
#include "sbmd/config.hpp"
#include "sbmd/experiment.hpp"
#include "sbmd/verify.hpp"

namespace sbmd {

namespace {

int cmd_run(const std::string& config_path, int jobs, const std::string& out_dir) {
    ExperimentConfig config = parse_config_file(config_path);
    if (const char* env = std::getenv("SBMD_SEED")) {
        try {
            config.run.seed = std::stoull(env);
        } catch (...) {
            throw ConfigError(0, std::string("SBMD_SEED is not an unsigned integer: ") + env);
        }
    }
    ExperimentResult result = run_experiment(config, jobs, out_dir);
    std::cout << "wrote " << result.csv_path << "\nwrote " << result.json_path << "\n";
    for (const auto& g : result.groups) {
        std::cout << "N=" << g.N << " mean=" << format_double(g.final_mean);
        if (g.final_se) std::cout << " se=" << format_double(*g.final_se);
        if (g.bound) std::cout << " bound=" << format_double(*g.bound);
        if (g.dominance_pass) std::cout << (*g.dominance_pass ? " [dominated]" : " [VIOLATED]");
        std::cout << "\n";
    }
    if (result.fit)
        std::cout << "rate slope=" << format_double(result.fit->slope)
                  << " se=" << format_double(result.fit->slope_se) << "\n";
    return 0;
}

int cmd_verify() {
    auto checks = run_verification();
    for (const auto& c : checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " — " << c.detail << "\n";
    if (!all_passed(checks)) {
        std::cout << "verification FAILED\n";
        return 2;
    }
    std::cout << "all checks passed\n";
    return 0;
}

int cmd_list_problems() {
    std::cout
        << "p1  nonsmooth-convex            f(x) = E|x - xi|_1, xi ~ U(c + [-delta,delta]^n) on a box\n"
        << "    constants: M_i = sqrt(n_i); f* = n*delta/2 at x* = c\n"
        << "    keys: n, b, delta, box_lower, box_upper, center\n"
        << "p2  nonsmooth-strongly-convex   p1 plus (mu/2)|x - c|^2; same minimizer\n"
        << "    constants: M_i = sqrt(n_i) + mu*rho_i; mu declared; Q = 1\n"
        << "    keys: n, b, delta, mu, box_lower, box_upper, center\n"
        << "p3  smooth-composite-convex     f = x'Ax/2 - b'x (diagonal A) + bounded gradient noise;\n"
        << "    chi = lambda*|x|_1 on free space; L_i = max_j a_j in block; sigma_i declared\n"
        << "    phi* from the deterministic proximal-gradient reference run\n"
        << "    keys: a_diag, b_vec, b, lambda, sigma, strongly [n for scalar a_diag]\n"
        << "p4  smooth-composite-nonconvex  f = sum x_j^2/(1+x_j^2); chi = lambda*|x|_1 on a box;\n"
        << "    L_i = 2; phi* = 0 at x* = 0\n"
        << "    keys: n, b, lambda, sigma, box_lower, box_upper\n";
    return 0;
}

int cmd_bound(const std::string& kind_name, long N, BoundSpec spec) {
    auto kind = bound_kind_from_string(kind_name);
    if (!kind) throw ConfigError(0, "unknown bound kind '" + kind_name + "'");
    spec.kind = *kind;
    try {
        std::cout << format_double(bound_value(spec, N)) << "\n";
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"stochastic block mirror descent toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--jobs", jobs, "concurrent trials")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory (overrides config)");

    auto* verify = app.add_subcommand("verify", "run the oracle verification suite");
    auto* list = app.add_subcommand("list-problems", "describe the problem zoo");

    std::string bound_kind;
    long bound_N = 0;
    BoundSpec spec;
    double sigma = -1.0, dtilde = 0.0, Q = 0.0, mu = 0.0, lbar = 0.0, dphi = -1.0, v1 = -1.0,
           lambda = 0.0;
    long k0 = 0, T = 0;
    auto* bound = app.add_subcommand("bound", "evaluate a theoretical bound");
    bound->add_option("kind", bound_kind,
                      "one of: nonsmooth-a nonsmooth-b-optimalD strongly composite "
                      "composite-strongly nonconvex-det nonconvex-stoch tail-nonsmooth tail-strongly")
        ->required();
    bound->add_option("--n", bound_N, "horizon N")->required();
    bound->add_option("--b", spec.b, "block count");
    bound->add_option("--D", spec.D, "per-block D_i")->delimiter(',');
    bound->add_option("--M", spec.M, "per-block M_i")->delimiter(',');
    bound->add_option("--dtilde", dtilde, "D tilde");
    bound->add_option("--Q", Q, "quadratic growth constant");
    bound->add_option("--mu", mu, "strong convexity modulus");
    bound->add_option("--lbar", lbar, "max block Lipschitz constant");
    bound->add_option("--sigma", sigma, "aggregate noise deviation");
    bound->add_option("--k0", k0, "composite-strongly shift");
    bound->add_option("--dphi", dphi, "phi(x_1) - phi*");
    bound->add_option("--v1", v1, "sum_i V_i(x_1, x*)");
    bound->add_option("--T", T, "mini-batch size");
    bound->add_option("--lambda", lambda, "tail parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, jobs, out_dir);
        if (verify->parsed()) return cmd_verify();
        if (list->parsed()) return cmd_list_problems();
        if (bound->parsed()) {
            if (dtilde > 0.0) spec.D_tilde = dtilde;
            if (Q > 0.0) spec.Q = Q;
            if (mu > 0.0) spec.mu = mu;
            if (lbar > 0.0) spec.L_bar = lbar;
            if (sigma >= 0.0) spec.sigma = sigma;
            if (k0 > 0) spec.k0 = k0;
            if (dphi >= 0.0) spec.dphi = dphi;
            if (v1 >= 0.0) spec.V1 = v1;
            if (T > 0) spec.T = T;
            if (lambda > 0.0) spec.lambda = lambda;
            return cmd_bound(bound_kind, bound_N, spec);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace sbmd
