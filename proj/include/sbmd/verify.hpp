#ifndef SBMD_VERIFY_HPP
#define SBMD_VERIFY_HPP

#include <functional>
#include <string>
#include <vector>

#include "sbmd/geometry.hpp"
#include "sbmd/problems.hpp"

namespace sbmd {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

bool all_passed(const std::vector<CheckResult>& checks);

// Prox objective <y,u> + V(u,v)/gamma + chi(u); no feasibility validation, so
// it can be evaluated on raw grid points.
double prox_objective(const BlockGeometry& geom, std::span<const double> v,
                      std::span<const double> y, double gamma, const RegularizerTerm& chi,
                      std::span<const double> u);

using ProxFn = std::function<std::vector<double>(
    const BlockGeometry&, std::span<const double>, std::span<const double>, double,
    const RegularizerTerm&)>;

ProxFn closed_form_prox();

struct ProxGridReport {
    int cases = 0;
    double max_excess = 0.0;    // prox objective minus the best grid point (should be <= tol)
    double max_residual = 0.0;  // first-order optimality residual where smooth
};

// Compares a prox implementation against brute-force minimization over a
// grid of relative resolution 1e-3, on `cases` random (geometry, v, y, gamma,
// chi) instances of one geometry kind. Composite l1 terms are exercised for
// the euclidean kinds.
ProxGridReport prox_grid_report(GeomKind kind, int cases, std::uint64_t seed, const ProxFn& fn,
                                bool with_regularizer = true);

// First-order optimality residual of u for the composite prox objective;
// independent of the prox implementation.
double prox_optimality_residual(const BlockGeometry& geom, std::span<const double> v,
                                std::span<const double> y, double gamma,
                                const RegularizerTerm& chi, std::span<const double> u);

// Averaging equivalence: incremental finalize vs direct weighted average on
// random block/weight trajectories. Returns the max relative deviation.
double averaging_equivalence_max_error(int cases, std::uint64_t seed);

// Monte Carlo check of E[p_i^{-1} U_i G_i] = g(x): max |mean - g| measured in
// coordinate standard errors, maximized over `points` random feasible x.
// Uniform block probabilities unless an explicit vector is given.
double estimator_unbiasedness_max_sigmas(const StochasticProblem& problem, int points, long draws,
                                         std::uint64_t seed);
double estimator_unbiasedness_max_sigmas(const StochasticProblem& problem, int points, long draws,
                                         std::uint64_t seed, const std::vector<double>& p);

// The full oracle suite behind `sbmd verify`.
std::vector<CheckResult> run_verification(std::uint64_t seed = 20240915);

}  // namespace sbmd

#endif
