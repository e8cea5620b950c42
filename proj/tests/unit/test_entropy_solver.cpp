#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sbmd/analysis.hpp"
#include "sbmd/plans.hpp"
#include "sbmd/solvers.hpp"
#include "sbmd/verify.hpp"

using namespace sbmd;

namespace {

// Linear objective over a product of simplexes with bounded noisy
// subgradients; drives the entropy prox and the l1/linf norm pairing through
// the full solver loop.
class SimplexLinearProblem : public StochasticProblem {
public:
    SimplexLinearProblem(std::vector<double> cost, std::vector<int> block_sizes, double noise)
        : cost_(std::move(cost)), noise_(noise) {
        auto structure = BlockStructure::of(std::move(block_sizes));
        std::vector<BlockGeometry> geoms;
        for (int i = 0; i < structure->block_count(); ++i)
            geoms.push_back(BlockGeometry::simplex(structure->block_size(i)));
        setup_ = std::make_shared<const ProxSetup>(ProxSetup(structure, std::move(geoms)));
        name_ = "simplex-linear";
        tag_ = ProblemClass::nonsmooth_convex;

        std::vector<double> M;
        double fstar = 0.0;
        std::vector<double> xs(cost_.size(), 0.0);
        for (int i = 0; i < structure->block_count(); ++i) {
            double cmax = 0.0, cmin = cost_[static_cast<std::size_t>(structure->block_offset(i))];
            int arg = structure->block_offset(i);
            for (int j = 0; j < structure->block_size(i); ++j) {
                double c = cost_[static_cast<std::size_t>(structure->block_offset(i) + j)];
                cmax = std::max(cmax, std::abs(c));
                if (c < cmin) {
                    cmin = c;
                    arg = structure->block_offset(i) + j;
                }
            }
            M.push_back(cmax + noise_);  // sure bound in the linf dual norm
            fstar += cmin;
            xs[static_cast<std::size_t>(arg)] = 1.0;
        }
        M_ = std::move(M);
        f_star_ = fstar;
        x_star_ = BlockVector(structure, std::move(xs));
    }

    Sample sample(RngStream& rng) const override {
        Sample s;
        s.data.resize(cost_.size());
        for (auto& v : s.data) v = noise_ * rng.uniform(-1.0, 1.0);
        return s;
    }

    void stoch_subgrad_block(const BlockVector&, const Sample& s, int i,
                             std::span<double> out) const override {
        check_block(i);
        int off = structure().block_offset(i);
        for (std::size_t j = 0; j < out.size(); ++j) {
            std::size_t k = static_cast<std::size_t>(off) + j;
            out[j] = cost_[k] + s.data[k];
        }
    }

    void grad_block_exact(const BlockVector&, int i, std::span<double> out) const override {
        check_block(i);
        int off = structure().block_offset(i);
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = cost_[static_cast<std::size_t>(off) + j];
    }

    double objective(const BlockVector& x) const override {
        double f = 0.0;
        for (std::size_t j = 0; j < cost_.size(); ++j) f += cost_[j] * x.values()[j];
        return f;
    }

private:
    std::vector<double> cost_;
    double noise_;
};

}  // namespace

TEST_CASE("entropy geometry end to end: solver, plan, bound") {
    // uneven simplex blocks give distinct D_i = ln(n_i), hence non-uniform p
    std::vector<double> cost{0.9, -0.4, 0.3, 0.8, 0.1, -0.7, 0.5, -0.2, 0.6, -0.1, 0.4, 0.2};
    SimplexLinearProblem problem(cost, {3, 9}, 0.5);

    CHECK(*problem.setup().D(0) == doctest::Approx(std::log(3.0)));
    CHECK(*problem.setup().D(1) == doctest::Approx(std::log(9.0)));
    CHECK(!problem.setup().Q());

    std::vector<double> D{std::log(3.0), std::log(9.0)};
    const int N = 512;
    StepsizePlan plan = plan_nonsmooth_a(D, *problem.M(), N);
    CHECK(plan.probabilities()[0] < plan.probabilities()[1]);

    BlockVector x1 = problem.setup().omega_min_point();
    BoundSpec spec;
    spec.kind = BoundKind::nonsmooth_a;
    spec.D = D;
    spec.M = *problem.M();
    const double bound = bound_value(spec, N);

    double first_sum = 0.0, final_sum = 0.0;
    const int trials = 8;
    for (int t = 0; t < trials; ++t) {
        TrialRng rng(31415, static_cast<std::uint64_t>(t));
        RunRecord rec = sbmd_run(problem, problem.setup(), plan, x1, N, rng, 31415 + t);
        CHECK(problem.setup().contains(rec.output, 1e-12));
        for (int i = 0; i < 2; ++i) {
            auto blk = rec.output.block(i);
            double s = 0.0;
            for (double v : blk) s += v;
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
        first_sum += rec.checkpoints.front().gap;
        final_sum += rec.checkpoints.back().gap;
        CHECK(rec.checkpoints.back().gap <= bound);
    }
    CHECK(final_sum / trials < 0.25 * (first_sum / trials));
    CHECK(final_sum / trials <= bound);

    // the importance-weighted block estimator is unbiased under this plan's
    // non-uniform probabilities as well
    double sigmas =
        estimator_unbiasedness_max_sigmas(problem, 2, 100000, 2718, plan.probabilities());
    CHECK(sigmas <= 4.0);
}

TEST_CASE("nonconvex run requires an exactly sized plan") {
    auto p = make_p4_nonconvex(4, 2, 0.1, 0.0, -1.0, 1.0);
    std::vector<double> pr{0.5, 0.5};
    auto plan = plan_nonconvex(*p->L(), pr, 32);
    BlockVector x1 = BlockVector::constant(p->structure_ptr(), 0.5);
    TrialRng rng(1, 0);
    CHECK_THROWS_AS(sbmd_nonconvex_run(*p, p->setup(), plan, x1, 16, 1, rng, 1),
                    std::invalid_argument);
}
