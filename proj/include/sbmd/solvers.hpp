#ifndef SBMD_SOLVERS_HPP
#define SBMD_SOLVERS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "sbmd/averaging.hpp"
#include "sbmd/blocks.hpp"
#include "sbmd/geometry.hpp"
#include "sbmd/plans.hpp"
#include "sbmd/problems.hpp"
#include "sbmd/rng.hpp"

namespace sbmd {

struct Checkpoint {
    long k = 0;
    double gap = 0.0;                      // f(xbar_k) - f* or phi(xbar_k) - phi*
    std::optional<double> pg_norm_sq;      // |PG|^2, nonconvex runs only
    long samples_used = 0;
};

struct RunRecord {
    std::uint64_t seed = 0;
    long N = 0;
    std::vector<Checkpoint> checkpoints;   // strictly increasing k
    BlockVector output;
    long samples_used = 0;
    long prox_calls = 0;
    double wall_ms = 0.0;
    // Max violation of the blockwise projected-gradient inequality, recorded
    // on nonconvex runs when the check is enabled.
    std::optional<double> lemma_slack_max;
};

// Geometric checkpoint cadence {1, 2, 4, ...} plus N itself.
std::vector<long> checkpoint_schedule(long N);

// Algorithm with incremental block averaging for nonsmooth problems
// (plan kinds nonsmooth-a, nonsmooth-b, strongly).
RunRecord sbmd_run(const StochasticProblem& problem, const ProxSetup& setup,
                   const StepsizePlan& plan, const BlockVector& x1, int N, TrialRng& rng,
                   std::uint64_t seed = 0);

// Composite variant: composite prox-mapping, theta_1 = 0, output averages
// x_2..x_{N+1} (plan kinds composite, composite-strongly).
RunRecord sbmd_composite_run(const StochasticProblem& problem, const ProxSetup& setup,
                             const StepsizePlan& plan, const BlockVector& x1, int N, TrialRng& rng,
                             std::uint64_t seed = 0);

// Nonconvex variant: mini-batch partial gradients of size T, randomized
// output index R drawn from the plan's output weights, checkpoints carry
// |PG(x_k, g(x_k), gamma_k)|^2 evaluated with the exact gradient.
RunRecord sbmd_nonconvex_run(const StochasticProblem& problem, const ProxSetup& setup,
                             const StepsizePlan& plan, const BlockVector& x1, int N, int T,
                             TrialRng& rng, std::uint64_t seed = 0, bool check_lemma = true);

// Full-vector mirror-descent SA baseline: every block is updated from the
// same sample each iteration; identical averaging.
RunRecord md_sa_run(const StochasticProblem& problem, const ProxSetup& setup,
                    const std::vector<double>& gamma, const std::vector<double>& theta,
                    const BlockVector& x1, int N, TrialRng& rng, std::uint64_t seed = 0);

// Composite projected gradient PG_i = (x^(i) - CP_i(x^(i), y^(i), gamma)) / gamma.
BlockVector projected_gradient(const ProxSetup& setup, const SeparableRegularizer* regularizer,
                               const BlockVector& x, const std::vector<double>& y, double gamma);

// Mean of T i.i.d. partial stochastic gradients at block i.
std::vector<double> minibatch_grad_block(const StochasticProblem& problem, const BlockVector& x,
                                         int i, int T, RngStream& rng);

}  // namespace sbmd

#endif
