// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Experiments are driven through the checked-in configs so that the CLI path
// (parse -> plan -> run -> aggregate -> bounds) is what gets certified.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "sbmd/analysis.hpp"
#include "sbmd/config.hpp"
#include "sbmd/experiment.hpp"
#include "sbmd/plans.hpp"
#include "sbmd/problems.hpp"
#include "sbmd/solvers.hpp"
#include "sbmd/verify.hpp"

#ifndef SBMD_SOURCE_DIR
#error "SBMD_SOURCE_DIR must point at the repository root"
#endif

namespace {

using namespace sbmd;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& label, const Outcome& outcome, double seconds,
            double budget_s) {
    bool pass = outcome.pass && seconds <= budget_s;
    if (!pass) ++failures;
    std::printf("[%s] %2d. %-34s %s (%.1fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", id,
                label.c_str(), outcome.detail.c_str(), seconds, budget_s);
    std::fflush(stdout);
}

template <typename Fn>
void criterion(int id, const std::string& label, double budget_s, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, label, outcome, seconds, budget_s);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

ExperimentConfig load(const std::string& name) {
    return parse_config_file(std::string(SBMD_SOURCE_DIR) + "/configs/" + name);
}

ExperimentResult run(const std::string& name, int jobs = 4) {
    ExperimentConfig config = load(name);
    return run_experiment(config, jobs, "acceptance_out/" + config.output.dir);
}

Outcome check_dominance(const ExperimentResult& res, std::string extra = "") {
    bool pass = true;
    std::ostringstream detail;
    for (const auto& g : res.groups) {
        if (!g.bound || !g.dominance_pass) return {false, "bound unavailable"};
        pass = pass && *g.dominance_pass;
        detail << "N=" << g.N << " mean=" << fmt(g.final_mean) << "<=" << fmt(*g.bound) << "  ";
    }
    if (res.slope_pass) {
        pass = pass && *res.slope_pass;
        detail << "slope=" << fmt(res.fit->slope);
    }
    detail << extra;
    return {pass, detail.str()};
}

Outcome prox_oracle() {
    const int cases = 500;
    auto box = prox_grid_report(GeomKind::euclidean_box, cases, 101, closed_form_prox());
    auto ball = prox_grid_report(GeomKind::euclidean_ball, cases, 102, closed_form_prox());
    auto simplex = prox_grid_report(GeomKind::entropy_simplex, cases, 103, closed_form_prox());
    double excess = std::max({box.max_excess, ball.max_excess, simplex.max_excess});
    double residual = std::max({box.max_residual, ball.max_residual, simplex.max_residual});
    return {excess <= 1e-3 && residual <= 1e-9,
            "1500 cases, max grid excess " + fmt(excess) + ", max FO residual " + fmt(residual)};
}

Outcome averaging_equivalence() {
    double err = averaging_equivalence_max_error(200, 2468);
    return {err <= 1e-12, "200 trajectories, max rel err " + fmt(err)};
}

Outcome unbiasedness() {
    std::vector<double> ramp05_2, ramp1_4;
    for (int j = 0; j < 16; ++j) {
        ramp05_2.push_back(0.5 + 0.1 * j);
        ramp1_4.push_back(1.0 + 0.2 * j);
    }
    auto p1 = make_p1_nonsmooth(16, 4, 0.5, -1.0, 1.0, 0.5);
    auto p2 = make_p2_strongly(16, 4, 0.5, 1.0, -1.0, 1.0, 0.5);
    auto p3 = make_p3_composite(ramp05_2, std::vector<double>(16, 1.0), 4, 0.5, 2.0);
    auto p4 = make_p4_nonconvex(16, 4, 0.1, 1.0, -1.0, 1.0);
    double worst = 0.0;
    std::uint64_t seed = 55;
    for (const auto& p : {p1, p2, p3, p4})
        worst = std::max(worst, estimator_unbiasedness_max_sigmas(*p, 5, 100000, seed++));
    return {worst <= 4.0, "4 problems x 5 points x 1e5 draws, max dev " + fmt(worst) + " SE"};
}

Outcome composite_with_insensitivity() {
    ExperimentResult base = run("p3_composite.ini");
    ExperimentResult scaled = run("p3_composite_lbar10.ini");
    Outcome dom_base = check_dominance(base);
    Outcome dom_scaled = check_dominance(scaled);
    double m0 = base.groups.back().final_mean;
    double m1 = scaled.groups.back().final_mean;
    double change = std::abs(m1 - m0) / m0;
    bool pass = dom_base.pass && dom_scaled.pass && change < 0.25;
    return {pass, dom_base.detail + " | Lx10 N=1600 change " + fmt(100.0 * change) + "%"};
}

Outcome nonconvex_both() {
    ExperimentResult det = run("p4_nonconvex_det.ini");
    ExperimentResult stoch = run("p4_nonconvex_stoch.ini");
    Outcome a = check_dominance(det);
    Outcome b = check_dominance(stoch);
    return {a.pass && b.pass, "det: " + a.detail + "| stoch: " + b.detail};
}

Outcome tails() {
    ExperimentResult res = run("p1_tail.ini");
    bool pass = true;
    std::ostringstream detail;
    if (res.groups.empty() || res.groups.front().tails.size() != 3) return {false, "no tail stats"};
    for (const auto& t : res.groups.front().tails) {
        pass = pass && t.pass;
        detail << "l=" << t.lambda << " freq=" << fmt(t.frequency) << "<=" << fmt(t.bound) << "  ";
    }
    return {pass, detail.str()};
}

Outcome determinism_and_collapse() {
    ExperimentConfig config = load("p1_nonsmooth_a.ini");
    config.run.n_grid = {50, 100};
    config.run.trials = 3;
    std::string csv1 = experiment_csv(config, 1);
    std::string csv2 = experiment_csv(config, 1);
    std::string csv4 = experiment_csv(config, 4);
    bool identical = csv_equal_excluding_wall(csv1, csv2) && csv_equal_excluding_wall(csv1, csv4);

    auto p = make_p1_nonsmooth(4, 1, 0.5, -1.0, 1.0, 0.3);
    auto plan = plan_nonsmooth_b(1.0, *p->M(), 1, 256);
    BlockVector x1 = p->setup().omega_min_point();
    TrialRng ra(17, 0), rb(17, 0);
    RunRecord sbmd_rec = sbmd_run(*p, p->setup(), plan, x1, 256, ra, 17);
    RunRecord sa_rec = md_sa_run(*p, p->setup(), plan.gammas(), plan.thetas(), x1, 256, rb, 17);
    bool collapse = sbmd_rec.output.values() == sa_rec.output.values() &&
                    sbmd_rec.checkpoints.size() == sa_rec.checkpoints.size();
    for (std::size_t i = 0; collapse && i < sa_rec.checkpoints.size(); ++i)
        collapse = sbmd_rec.checkpoints[i].gap == sa_rec.checkpoints[i].gap;
    return {identical && collapse,
            std::string("csv identical=") + (identical ? "yes" : "NO") +
                " b=1 collapse bitwise=" + (collapse ? "yes" : "NO")};
}

}  // namespace

int main() {
    std::filesystem::create_directories("acceptance_out");

    criterion(1, "prox oracle equivalence", 30, prox_oracle);
    criterion(2, "averaging equivalence", 5, averaging_equivalence);
    criterion(3, "estimator unbiasedness", 60, unbiasedness);
    criterion(4, "nonsmooth rate (p1)", 120,
              [] { return check_dominance(run("p1_nonsmooth_a.ini")); });
    criterion(5, "strongly convex rate (p2)", 120,
              [] { return check_dominance(run("p2_strongly.ini")); });
    criterion(6, "composite rate + L insensitivity", 180, composite_with_insensitivity);
    criterion(7, "composite strongly convex (p3)", 180,
              [] { return check_dominance(run("p3_composite_strongly.ini")); });
    criterion(8, "nonconvex stationarity (p4)", 180, nonconvex_both);
    criterion(9, "large-deviation tails (p1)", 180, tails);
    criterion(10, "determinism and b=1 collapse", 30, determinism_and_collapse);

    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
