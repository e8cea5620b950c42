#include <doctest.h>

#include <cmath>

#include "sbmd/problems.hpp"
#include "sbmd/rng.hpp"
#include "sbmd/verify.hpp"

using namespace sbmd;

namespace {

// Simpson quadrature of E|t - u| for u uniform on [-delta, delta].
double expected_abs_dev(double t, double delta) {
    const int m = 4000;
    double h = 2.0 * delta / m;
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        double u = -delta + i * h;
        double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * std::abs(t - u);
    }
    return acc * h / 3.0 / (2.0 * delta);
}

}  // namespace

TEST_CASE("p1 sampling: degenerate noise, determinism, empirical mean") {
    auto p0 = make_p1_nonsmooth(4, 2, 0.0, -1.0, 1.0, 0.25);
    RngStream rng(42);
    Sample s = p0->sample(rng);
    CHECK(s.data == std::vector<double>(4, 0.25));

    auto p = make_p1_nonsmooth(4, 2, 0.5, -1.0, 1.0, 0.25);
    RngStream a(42), b(42);
    Sample s1 = p->sample(a);
    Sample s2 = p->sample(a);
    CHECK(s1.data != s2.data);
    CHECK(p->sample(b).data == s1.data);
    CHECK(p->sample(b).data == s2.data);

    const long draws = 100000;
    const double delta = 0.5;
    std::vector<double> mean(4, 0.0);
    RngStream r(7);
    for (long t = 0; t < draws; ++t) {
        Sample sm = p->sample(r);
        for (int j = 0; j < 4; ++j) mean[static_cast<std::size_t>(j)] += sm.data[static_cast<std::size_t>(j)];
    }
    double tol = 3.0 * delta / std::sqrt(3.0 * draws);
    for (double m : mean) CHECK(std::abs(m / draws - 0.25) <= tol);
}

TEST_CASE("p1 subgradients: tie rule, sure bound, analytic mean") {
    auto p = make_p1_nonsmooth(4, 2, 0.0, -1.0, 1.0, 0.25);
    BlockVector x = BlockVector::constant(p->structure_ptr(), 0.25);
    RngStream rng(1);
    Sample s = p->sample(rng);  // equals the center
    std::vector<double> g(2);
    p->stoch_subgrad_block(x, s, 0, g);
    CHECK(g == std::vector<double>{0.0, 0.0});

    CHECK((*p->M())[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(p->stoch_subgrad_block(x, s, 5, g), std::invalid_argument);

    auto pn = make_p1_nonsmooth(4, 2, 0.5, -1.0, 1.0, 0.0);
    double sigmas = estimator_unbiasedness_max_sigmas(*pn, 2, 100000, 5);
    CHECK(sigmas <= 4.0);
}

TEST_CASE("p1 objective: analytic value vs quadrature") {
    const int n = 16;
    const double delta = 0.5;
    auto p = make_p1_nonsmooth(n, 4, delta, -1.0, 1.0, 0.0);
    BlockVector c = BlockVector::zeros(p->structure_ptr());
    CHECK(p->objective(c) == doctest::Approx(n * delta / 2.0));
    CHECK(*p->f_star() == doctest::Approx(n * delta / 2.0));

    for (double t : {0.0, 0.2, 0.49, 0.5, 0.8}) {
        BlockVector x = BlockVector::constant(p->structure_ptr(), t);
        CHECK(p->objective(x) == doctest::Approx(n * expected_abs_dev(t, delta)).epsilon(1e-7));
    }
}

TEST_CASE("p2: reduction at mu=0, zero gradient at center, f*") {
    auto p2 = make_p2_strongly(4, 2, 0.5, 0.0, -1.0, 1.0, 0.25);
    auto p1 = make_p1_nonsmooth(4, 2, 0.5, -1.0, 1.0, 0.25);
    BlockVector x = BlockVector::constant(p1->structure_ptr(), 0.7);
    BlockVector x2(p2->structure_ptr(), x.values());
    CHECK(p2->objective(x2) == p1->objective(x));

    auto ps = make_p2_strongly(4, 2, 0.0, 2.0, -1.0, 1.0, 0.25);
    BlockVector c = BlockVector::constant(ps->structure_ptr(), 0.25);
    RngStream rng(1);
    Sample s = ps->sample(rng);
    std::vector<double> g(2);
    ps->stoch_subgrad_block(c, s, 0, g);
    CHECK(g == std::vector<double>{0.0, 0.0});

    auto pm = make_p2_strongly(4, 2, 0.5, 3.0, -1.0, 1.0, 0.25);
    CHECK(*pm->f_star() == doctest::Approx(4 * 0.5 / 2.0));  // independent of mu
    CHECK(pm->mu() == 3.0);
    CHECK(pm->tag() == ProblemClass::nonsmooth_strongly_convex);
}

TEST_CASE("p3: constants, noiseless gradient, reference optimum") {
    auto p = make_p3_composite({1.0, 2.0}, {0.0, 0.0}, 2, 0.0, 0.0);
    CHECK((*p->L()) == std::vector<double>{1.0, 2.0});
    CHECK(p->L_bar() == 2.0);
    BlockVector x = BlockVector::constant(p->structure_ptr(), 1.0);
    RngStream rng(3);
    Sample s = p->sample(rng);
    std::vector<double> g(1);
    p->stoch_subgrad_block(x, s, 0, g);
    CHECK(g == std::vector<double>{1.0});
    p->stoch_subgrad_block(x, s, 1, g);
    CHECK(g == std::vector<double>{2.0});

    // lambda = 0: closed-form minimum -b'A^{-1}b/2 at x = A^{-1}b
    auto q = make_p3_composite({2.0, 4.0}, {1.0, 2.0}, 2, 0.0, 0.5);
    BlockVector xs(q->structure_ptr(), {0.5, 0.5});
    CHECK(q->objective(xs) == doctest::Approx(-0.5 * (0.5 + 1.0)));
    CHECK(*q->f_star() == doctest::Approx(-0.75));

    // lambda > 0: reference prox-gradient run vs the separable closed form
    auto r = make_p3_composite({2.0, 2.0}, {1.0, 1.0}, 2, 0.5, 0.0);
    // per coordinate: argmin a z^2/2 - b z + lambda |z| = soft(b, lambda)/a = 0.25
    double xstar = 0.25;
    double phi_star = 2.0 * (0.5 * 2.0 * xstar * xstar - xstar + 0.5 * xstar);
    CHECK(*r->phi_star() == doctest::Approx(phi_star).epsilon(1e-8));
    auto ref = r->reference_minimizer();
    CHECK((*ref).values()[0] == doctest::Approx(xstar).epsilon(1e-6));

    CHECK_THROWS_AS(make_p3_composite({1.0, 0.0}, {0.0, 0.0}, 2, 0.0, 0.0), std::invalid_argument);

    auto st = make_p3_composite({1.0, 3.0}, {0.0, 0.0}, 2, 0.1, 0.0, true);
    CHECK(st->mu() == 1.0);
    CHECK(st->tag() == ProblemClass::smooth_composite_strongly_convex);
}

TEST_CASE("p4: objective, gradient, curvature bound") {
    auto p = make_p4_nonconvex(4, 2, 0.3, 0.0, -1.0, 1.0);
    BlockVector zero = BlockVector::zeros(p->structure_ptr());
    CHECK(p->composite_objective(zero) == 0.0);
    CHECK(*p->phi_star() == 0.0);

    BlockVector one = BlockVector::constant(p->structure_ptr(), 1.0);
    std::vector<double> g(2);
    p->grad_block_exact(one, 0, g);
    CHECK(g[0] == doctest::Approx(0.5));

    // L_i = 2 via finite differences of the gradient on a grid
    double worst = 0.0;
    for (int i = -40; i <= 40; ++i) {
        double t = i / 10.0;
        double h = 1e-5;
        auto d1 = [&](double v) { return 2.0 * v / ((1.0 + v * v) * (1.0 + v * v)); };
        worst = std::max(worst, std::abs((d1(t + h) - d1(t - h)) / (2.0 * h)));
    }
    CHECK(worst <= 2.0 + 1e-6);
    CHECK(p->L_bar() == 2.0);

    CHECK_THROWS_AS(make_p4_nonconvex(4, 2, 0.1, 0.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("smooth problems: noise second moment is calibrated") {
    auto p = make_p3_composite(std::vector<double>(4, 1.0), std::vector<double>(4, 0.0), 2, 0.0,
                               1.5);
    RngStream rng(17);
    BlockVector x = BlockVector::zeros(p->structure_ptr());
    std::vector<double> g(2), buf(2);
    p->grad_block_exact(x, 0, g);
    double acc = 0.0;
    const long draws = 200000;
    for (long t = 0; t < draws; ++t) {
        Sample s = p->sample(rng);
        p->stoch_subgrad_block(x, s, 0, buf);
        acc += (buf[0] - g[0]) * (buf[0] - g[0]) + (buf[1] - g[1]) * (buf[1] - g[1]);
    }
    CHECK(acc / draws == doctest::Approx(1.5 * 1.5).epsilon(0.02));
}

TEST_CASE("objective never consumes the sample stream") {
    auto p = make_p1_nonsmooth(4, 2, 0.5, -1.0, 1.0, 0.0);
    RngStream a(9), b(9);
    BlockVector x = BlockVector::constant(p->structure_ptr(), 0.3);
    Sample s1 = p->sample(a);
    (void)p->objective(x);
    (void)p->composite_objective(x);
    Sample s2 = p->sample(a);
    CHECK(p->sample(b).data == s1.data);
    CHECK(p->sample(b).data == s2.data);
}
