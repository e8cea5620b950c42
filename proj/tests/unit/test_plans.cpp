#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sbmd/plans.hpp"

using namespace sbmd;

TEST_CASE("nonsmooth-a plan: probabilities and constant stepsize") {
    auto plan = plan_nonsmooth_a({1.0, 1.0}, {1.0, 1.0}, 8);
    CHECK(plan.probabilities() == std::vector<double>{0.5, 0.5});
    CHECK(plan.gamma(1) == doctest::Approx(2.0 * std::sqrt(2.0) / 4.0));
    CHECK(plan.theta(8) == plan.gamma(8));

    auto single = plan_nonsmooth_a({0.7}, {1.3}, 16);
    CHECK(single.probabilities() == std::vector<double>{1.0});
    CHECK(single.gamma(1) == doctest::Approx(std::sqrt(2.0 * 0.7 / (16.0 * 1.3 * 1.3))));

    auto skew = plan_nonsmooth_a({4.0, 1.0}, {1.0, 1.0}, 8);
    CHECK(skew.probabilities()[0] == doctest::Approx(2.0 / 3.0));
    CHECK(skew.probabilities()[1] == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(plan_nonsmooth_a({1.0, 0.0}, {1.0, 1.0}, 8), std::invalid_argument);
}

TEST_CASE("nonsmooth-b plan: uniform probabilities, D-tilde scaling") {
    auto plan = plan_nonsmooth_b(1.0, std::vector<double>(4, 1.0), 4, 64);
    CHECK(plan.gamma(1) == doctest::Approx(std::sqrt(8.0) / std::sqrt(64.0 * 4.0)));
    CHECK(plan.probabilities() == std::vector<double>(4, 0.25));

    // b = 1 with D-tilde = sqrt(D) recovers the part-(a) stepsize
    auto a = plan_nonsmooth_a({0.9}, {1.1}, 32);
    auto b = plan_nonsmooth_b(std::sqrt(0.9), {1.1}, 1, 32);
    CHECK(a.gamma(1) == doctest::Approx(b.gamma(1)).epsilon(1e-15));

    auto skew = plan_nonsmooth_b(77.0, std::vector<double>(3, 2.0), 3, 10);
    CHECK(skew.probabilities() == std::vector<double>(3, 1.0 / 3.0));
}

TEST_CASE("strongly convex plan: recursion and closed forms") {
    auto plan = plan_strongly(2, 1.0, 1.0, 16);
    CHECK(plan.gamma(1) == doctest::Approx(2.0));
    CHECK(plan.gamma(2) == doctest::Approx(4.0 / 3.0));
    CHECK(plan.gamma(3) == doctest::Approx(1.0));
    CHECK(plan.Gamma(2) == doctest::Approx(1.0 / 3.0));
    CHECK(plan.theta(2) == doctest::Approx(4.0));

    double sum_theta = 0.0;
    for (int k = 1; k <= 16; ++k) {
        CHECK(plan.Gamma(k) == doctest::Approx(2.0 / (k * (k + 1.0))).epsilon(1e-12));
        CHECK(plan.theta(k) == doctest::Approx(2.0 * k).epsilon(1e-12));  // b k Q / mu
        sum_theta += plan.theta(k);
    }
    CHECK(sum_theta == doctest::Approx(2.0 * 1.0 * 16.0 * 17.0 / 2.0));

    // gamma_1 attains the constraint bQ/mu with equality
    CHECK(plan.gamma(1) == doctest::Approx(2.0 * 1.0 / 1.0));
    CHECK_THROWS_AS(plan_strongly(2, 1.0, 0.0, 8), std::invalid_argument);
}

TEST_CASE("composite plan: min rule and constant weights") {
    auto noiseless = plan_composite(2, 4.0, 0.0, 1.0, 32);
    CHECK(noiseless.gamma(1) == doctest::Approx(0.125));

    auto plan = plan_composite(2, 4.0, 1.0, 1.0, 32);
    CHECK(plan.gamma(1) == doctest::Approx(std::min(0.125, std::sqrt(2.0 / 32.0))));
    CHECK(plan.theta(1) == 0.0);
    for (int k = 2; k <= 33; ++k) CHECK(plan.theta(k) == doctest::Approx(plan.gamma(1)));

    auto wide = plan_composite(3, 0.2, 5.0, 0.5, 9);
    CHECK(wide.gamma(1) == doctest::Approx(std::min(2.5, 0.1 * std::sqrt(3.0 / 9.0))));
}

TEST_CASE("composite strongly plan: k0, caps, positivity") {
    auto plan = plan_composite_strongly(2, 1.0, 1.0, 1.0, 32);
    CHECK(*plan.meta().k0 == 8);
    CHECK(plan.gamma(1) == doctest::Approx(4.0 / 9.0));
    CHECK(plan.gamma(1) <= 0.5);
    CHECK(plan.Gamma(1) == 1.0);
    CHECK(plan.theta(1) == 0.0);
    const double k0 = 8.0;
    for (int k = 1; k <= 32; ++k) {
        double closed = k0 * (k0 + 1.0) / ((k + k0) * (k + k0 - 1.0));
        CHECK(plan.Gamma(k) == doctest::Approx(closed).epsilon(1e-12));
        // positivity margin: theta_{k+1} >= 2 b k / (mu Q k0 (k0+1))
        CHECK(plan.theta(k + 1) >= 2.0 * 2.0 * k / (1.0 * 1.0 * k0 * (k0 + 1.0)) - 1e-12);
    }
    CHECK_THROWS_AS(plan_composite_strongly(1, 1.0, 8.0, 1.0, 8), std::invalid_argument);  // k0 = 0
}

TEST_CASE("nonconvex plan: uniform output weights at constant stepsize") {
    std::vector<double> p{0.5, 0.5};
    auto plan = plan_nonconvex({1.0, 2.0}, p, 8);
    CHECK(plan.gamma(1) == doctest::Approx(0.5));
    // min_i p_i (1 - L_i gamma / 2) = 0.5 * min(0.75, 0.5) = 0.25 each step
    double m = std::min(p[0] * (1.0 - 0.5 * 1.0 * 0.5), p[1] * (1.0 - 0.5 * 2.0 * 0.5));
    CHECK(m == doctest::Approx(0.25));
    for (double w : plan.output_weights()) CHECK(w == doctest::Approx(1.0 / 8.0));

    auto one = plan_nonconvex({2.0}, {1.0}, 1);
    CHECK(one.output_weights() == std::vector<double>{1.0});

    CHECK_THROWS_AS(plan_nonconvex({0.0, 1.0}, p, 4), std::invalid_argument);
}

TEST_CASE("plan validation rejects kind-specific stepsize violations") {
    std::vector<double> p{0.5, 0.5};
    PlanMeta meta;
    meta.Q = 1.0;
    meta.mu = 1.0;
    // strongly: gamma > bQ/mu
    CHECK_THROWS_AS(
        (StepsizePlan::custom(PlanKind::strongly_convex, {2.5}, {2.5}, p, {1.0}, {}, meta)),
        std::invalid_argument);
    PlanMeta cm;
    cm.L_bar = 4.0;
    // composite: gamma > 1/(2 L)
    CHECK_THROWS_AS((StepsizePlan::custom(PlanKind::composite, {0.2}, {0.0, 0.2}, p, {}, {}, cm)),
                    std::invalid_argument);
    // composite: theta_1 must vanish
    CHECK_THROWS_AS((StepsizePlan::custom(PlanKind::composite, {0.1}, {0.1, 0.1}, p, {}, {}, cm)),
                    std::invalid_argument);
    // nonconvex: gamma must stay below 2/L_i
    CHECK_THROWS_AS(
        (StepsizePlan::custom(PlanKind::nonconvex, {1.0}, {}, p, {}, {1.0}, {}, {1.0, 2.0})),
        std::invalid_argument);
    // probabilities must sum to one
    CHECK_THROWS_AS((StepsizePlan::custom(PlanKind::nonsmooth_b, {0.1}, {0.1}, {0.4, 0.4})),
                    std::invalid_argument);
    // probabilities must be positive
    CHECK_THROWS_AS((StepsizePlan::custom(PlanKind::nonsmooth_b, {0.1}, {0.1}, {1.0, 0.0})),
                    std::invalid_argument);
}
