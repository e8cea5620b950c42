#include "sbmd/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbmd {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

void validate_run_inputs(const StochasticProblem& problem, const ProxSetup& setup,
                         const BlockVector& x1, int N) {
    if (N < 1) throw std::invalid_argument("run: N must be at least 1");
    if (!(x1.structure() == setup.structure()))
        throw std::invalid_argument("run: x1/setup structure mismatch");
    if (!(problem.structure() == setup.structure()))
        throw std::invalid_argument("run: problem/setup structure mismatch");
    if (!setup.contains(x1)) throw std::domain_error("run: x1 is infeasible");
}

void validate_plan(const StepsizePlan& plan, const ProxSetup& setup, int N,
                   std::initializer_list<PlanKind> kinds) {
    if (plan.block_count() != setup.block_count())
        throw std::invalid_argument("run: plan/structure block count mismatch");
    if (plan.horizon() < N) throw std::invalid_argument("run: plan horizon shorter than N");
    if (std::find(kinds.begin(), kinds.end(), plan.kind()) == kinds.end())
        throw std::invalid_argument("run: plan kind incompatible with this algorithm");
}

double checkpoint_gap(const StochasticProblem& problem, const BlockVector& xbar, bool composite) {
    auto star = composite ? problem.phi_star() : problem.f_star();
    if (!star) throw std::logic_error("run: reference optimal value unavailable");
    double value = composite ? problem.composite_objective(xbar) : problem.objective(xbar);
    double gap = value - *star;
    if (!std::isfinite(gap)) throw std::runtime_error("run: non-finite checkpoint gap");
    return gap;
}

RegularizerTerm reg_term(const StochasticProblem& problem, int i) {
    return problem.regularizer() ? problem.regularizer()->term(i) : RegularizerTerm::zero();
}

}  // namespace

std::vector<long> checkpoint_schedule(long N) {
    std::vector<long> ks;
    for (long k = 1; k < N; k *= 2) ks.push_back(k);
    ks.push_back(N);
    return ks;
}

RunRecord sbmd_run(const StochasticProblem& problem, const ProxSetup& setup,
                   const StepsizePlan& plan, const BlockVector& x1, int N, TrialRng& rng,
                   std::uint64_t seed) {
    const auto t0 = clock_type::now();
    validate_run_inputs(problem, setup, x1, N);
    validate_plan(plan, setup, N,
                  {PlanKind::nonsmooth_a, PlanKind::nonsmooth_b, PlanKind::strongly_convex});

    const auto schedule = checkpoint_schedule(N);
    AveragingState avg(setup.structure_ptr(), plan.thetas());
    BlockVector x = x1;
    std::vector<Checkpoint> checkpoints;
    std::vector<double> gbuf;
    long samples = 0, prox_calls = 0;
    std::size_t next_cp = 0;

    for (int k = 1; k <= N; ++k) {
        int i_k = rng.block_index.categorical(plan.probabilities());
        avg.update(i_k, x, k);
        Sample s = problem.sample(rng.sample);
        ++samples;
        gbuf.resize(static_cast<std::size_t>(setup.structure().block_size(i_k)));
        problem.stoch_subgrad_block(x, s, i_k, gbuf);
        auto u = prox_step(setup, i_k, x.block(i_k), gbuf, plan.gamma(k));
        ++prox_calls;
        std::copy(u.begin(), u.end(), x.block(i_k).begin());

        if (next_cp < schedule.size() && schedule[next_cp] == k) {
            BlockVector xbar = avg.snapshot(x, k);
            checkpoints.push_back({k, checkpoint_gap(problem, xbar, false), std::nullopt, samples});
            ++next_cp;
        }
    }
    BlockVector output = avg.finalize(x, N);
    return RunRecord{seed, N, std::move(checkpoints), std::move(output),
                     samples, prox_calls, ms_since(t0), std::nullopt};
}

RunRecord sbmd_composite_run(const StochasticProblem& problem, const ProxSetup& setup,
                             const StepsizePlan& plan, const BlockVector& x1, int N, TrialRng& rng,
                             std::uint64_t seed) {
    const auto t0 = clock_type::now();
    validate_run_inputs(problem, setup, x1, N);
    validate_plan(plan, setup, N, {PlanKind::composite, PlanKind::composite_strongly});
    for (int i = 0; i < setup.block_count(); ++i) {
        if (reg_term(problem, i).kind == RegularizerTerm::Kind::l1 && !setup.geometry(i).is_euclidean())
            throw std::invalid_argument("run: regularizer incompatible with block geometry");
    }

    const auto schedule = checkpoint_schedule(N);
    AveragingState avg(setup.structure_ptr(), plan.thetas());
    BlockVector x = x1;
    std::vector<Checkpoint> checkpoints;
    std::vector<double> gbuf;
    long samples = 0, prox_calls = 0;
    std::size_t next_cp = 0;

    for (int k = 1; k <= N; ++k) {
        int i_k = rng.block_index.categorical(plan.probabilities());
        avg.update(i_k, x, k);
        Sample s = problem.sample(rng.sample);
        ++samples;
        gbuf.resize(static_cast<std::size_t>(setup.structure().block_size(i_k)));
        problem.stoch_subgrad_block(x, s, i_k, gbuf);
        auto u = composite_prox_step(setup, i_k, x.block(i_k), gbuf, plan.gamma(k),
                                     reg_term(problem, i_k));
        ++prox_calls;
        std::copy(u.begin(), u.end(), x.block(i_k).begin());

        if (next_cp < schedule.size() && schedule[next_cp] == k) {
            // Output averages x_2..x_{k+1}: flush through weight index k+1.
            BlockVector xbar = avg.snapshot(x, k + 1);
            checkpoints.push_back({k, checkpoint_gap(problem, xbar, true), std::nullopt, samples});
            ++next_cp;
        }
    }
    BlockVector output = avg.finalize(x, N + 1);
    return RunRecord{seed, N, std::move(checkpoints), std::move(output),
                     samples, prox_calls, ms_since(t0), std::nullopt};
}

RunRecord sbmd_nonconvex_run(const StochasticProblem& problem, const ProxSetup& setup,
                             const StepsizePlan& plan, const BlockVector& x1, int N, int T,
                             TrialRng& rng, std::uint64_t seed, bool check_lemma) {
    const auto t0 = clock_type::now();
    validate_run_inputs(problem, setup, x1, N);
    validate_plan(plan, setup, N, {PlanKind::nonconvex});
    if (plan.horizon() != N)
        throw std::invalid_argument("run: nonconvex plan horizon must equal N");
    if (T < 1) throw std::invalid_argument("run: mini-batch size must be at least 1");
    if (problem.tag() != ProblemClass::smooth_composite_nonconvex)
        throw std::invalid_argument("run: nonconvex solver needs a nonconvex problem");

    const auto schedule = checkpoint_schedule(N);
    const int R = 1 + rng.output_index.categorical(plan.output_weights());
    BlockVector x = x1;
    BlockVector x_R = x1;
    std::vector<Checkpoint> checkpoints;
    std::vector<double> gfull(static_cast<std::size_t>(x.dim()));
    long samples = 0, prox_calls = 0;
    double slack_max = -std::numeric_limits<double>::infinity();
    std::size_t next_cp = 0;

    for (int k = 1; k <= N; ++k) {
        if (k == R) x_R = x;
        const double gamma = plan.gamma(k);
        if (next_cp < schedule.size() && schedule[next_cp] == k) {
            problem.grad_exact(x, gfull);
            BlockVector pg = projected_gradient(setup, problem.regularizer(), x, gfull, gamma);
            double pg2 = 0.0;
            for (double v : pg.values()) pg2 += v * v;
            checkpoints.push_back({k, checkpoint_gap(problem, x, true), pg2, samples});
            ++next_cp;
        }

        int i_k = rng.block_index.categorical(plan.probabilities());
        auto G = minibatch_grad_block(problem, x, i_k, T, rng.sample);
        samples += T;
        auto u = composite_prox_step(setup, i_k, x.block(i_k), G, gamma, reg_term(problem, i_k));
        ++prox_calls;

        if (check_lemma) {
            // |PG_i(x, G, gamma) - PG_i(x, g_i(x), gamma)|_i <= |G - g_i(x)|_{i,*}
            problem.grad_exact(x, gfull);
            BlockVector pg = projected_gradient(setup, problem.regularizer(), x, gfull, gamma);
            auto xb = x.block(i_k);
            auto pgb = pg.block(i_k);
            auto gb = std::span<const double>(gfull).subspan(
                static_cast<std::size_t>(setup.structure().block_offset(i_k)), u.size());
            std::vector<double> lhs(u.size()), rhs(u.size());
            for (std::size_t j = 0; j < u.size(); ++j) {
                lhs[j] = (xb[j] - u[j]) / gamma - pgb[j];
                rhs[j] = G[j] - gb[j];
            }
            const BlockGeometry& geom = setup.geometry(i_k);
            slack_max = std::max(slack_max, block_norm(geom, lhs, NormMode::primal) -
                                                block_norm(geom, rhs, NormMode::dual));
        }

        std::copy(u.begin(), u.end(), x.block(i_k).begin());
    }

    RunRecord rec{seed, N, std::move(checkpoints), std::move(x_R),
                  samples, prox_calls, ms_since(t0), std::nullopt};
    if (check_lemma) rec.lemma_slack_max = slack_max;
    return rec;
}

RunRecord md_sa_run(const StochasticProblem& problem, const ProxSetup& setup,
                    const std::vector<double>& gamma, const std::vector<double>& theta,
                    const BlockVector& x1, int N, TrialRng& rng, std::uint64_t seed) {
    const auto t0 = clock_type::now();
    validate_run_inputs(problem, setup, x1, N);
    if (static_cast<int>(gamma.size()) < N || static_cast<int>(theta.size()) < N)
        throw std::invalid_argument("run: stepsize arrays shorter than N");

    const auto schedule = checkpoint_schedule(N);
    AveragingState avg(setup.structure_ptr(), theta);
    BlockVector x = x1;
    std::vector<Checkpoint> checkpoints;
    std::vector<double> gfull(static_cast<std::size_t>(x.dim()));
    long samples = 0, prox_calls = 0;
    std::size_t next_cp = 0;

    for (int k = 1; k <= N; ++k) {
        for (int i = 0; i < setup.block_count(); ++i) avg.update(i, x, k);
        Sample s = problem.sample(rng.sample);
        ++samples;
        problem.stoch_subgrad(x, s, gfull);
        for (int i = 0; i < setup.block_count(); ++i) {
            auto gi = std::span<const double>(gfull).subspan(
                static_cast<std::size_t>(setup.structure().block_offset(i)),
                static_cast<std::size_t>(setup.structure().block_size(i)));
            auto u = prox_step(setup, i, x.block(i), gi, gamma[static_cast<std::size_t>(k - 1)]);
            ++prox_calls;
            std::copy(u.begin(), u.end(), x.block(i).begin());
        }

        if (next_cp < schedule.size() && schedule[next_cp] == k) {
            BlockVector xbar = avg.snapshot(x, k);
            checkpoints.push_back({k, checkpoint_gap(problem, xbar, false), std::nullopt, samples});
            ++next_cp;
        }
    }
    BlockVector output = avg.finalize(x, N);
    return RunRecord{seed, N, std::move(checkpoints), std::move(output),
                     samples, prox_calls, ms_since(t0), std::nullopt};
}

BlockVector projected_gradient(const ProxSetup& setup, const SeparableRegularizer* regularizer,
                               const BlockVector& x, const std::vector<double>& y, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("projected_gradient: gamma must be positive");
    if (static_cast<int>(y.size()) != x.dim())
        throw std::invalid_argument("projected_gradient: dual vector length mismatch");
    BlockVector pg = BlockVector::zeros(x.structure_ptr());
    for (int i = 0; i < setup.block_count(); ++i) {
        auto yi = std::span<const double>(y).subspan(
            static_cast<std::size_t>(setup.structure().block_offset(i)),
            static_cast<std::size_t>(setup.structure().block_size(i)));
        RegularizerTerm chi = regularizer ? regularizer->term(i) : RegularizerTerm::zero();
        auto u = composite_prox_step(setup, i, x.block(i), yi, gamma, chi);
        auto xb = x.block(i);
        auto out = pg.block(i);
        for (std::size_t j = 0; j < u.size(); ++j) out[j] = (xb[j] - u[j]) / gamma;
    }
    return pg;
}

std::vector<double> minibatch_grad_block(const StochasticProblem& problem, const BlockVector& x,
                                         int i, int T, RngStream& rng) {
    if (T < 1) throw std::invalid_argument("minibatch: T must be at least 1");
    problem.check_block(i);
    std::size_t ni = static_cast<std::size_t>(problem.structure().block_size(i));
    std::vector<double> acc(ni, 0.0), buf(ni);
    for (int t = 0; t < T; ++t) {
        Sample s = problem.sample(rng);
        problem.stoch_subgrad_block(x, s, i, buf);
        for (std::size_t j = 0; j < ni; ++j) acc[j] += buf[j];
    }
    for (auto& v : acc) v /= T;
    return acc;
}

}  // namespace sbmd
