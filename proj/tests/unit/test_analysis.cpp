#include <doctest.h>

#include <cmath>

#include "sbmd/analysis.hpp"
#include "sbmd/rng.hpp"

using namespace sbmd;

namespace {

RunRecord synthetic_record(long N, const std::vector<std::pair<long, double>>& gaps,
                           std::uint64_t seed = 0) {
    auto structure = BlockStructure::even(1, 1);
    std::vector<Checkpoint> cps;
    for (auto [k, gap] : gaps) cps.push_back({k, gap, std::nullopt, k});
    return RunRecord{seed, N, std::move(cps), BlockVector::zeros(structure), N, N, 0.0,
                     std::nullopt};
}

}  // namespace

TEST_CASE("bound_value matches hand-evaluated formulas") {
    BoundSpec a;
    a.kind = BoundKind::nonsmooth_a;
    a.D = {1.0, 1.0};
    a.M = {1.0, 1.0};
    CHECK(bound_value(a, 8) == doctest::Approx(std::sqrt(2.0)));

    BoundSpec s;
    s.kind = BoundKind::strongly;
    s.b = 2;
    s.Q = 1.0;
    s.mu = 1.0;
    s.M = {1.0, 1.0};
    CHECK(bound_value(s, 7) == doctest::Approx(1.0));

    BoundSpec d;
    d.kind = BoundKind::nonconvex_det;
    d.b = 1;
    d.L_bar = 2.0;
    d.dphi = 1.0;
    CHECK(bound_value(d, 100) == doctest::Approx(0.04));

    BoundSpec st = d;
    st.kind = BoundKind::nonconvex_stoch;
    st.sigma = 2.0;
    st.T = 8;
    CHECK(bound_value(st, 100) == doctest::Approx(0.04 + 4.0 * 1 * 4.0 / 8.0));

    BoundSpec c;
    c.kind = BoundKind::composite;
    c.b = 2;
    c.L_bar = 4.0;
    c.sigma = 1.0;
    c.D_tilde = 1.0;
    c.dphi = 3.0;
    c.V1 = 2.0;
    CHECK(bound_value(c, 16) ==
          doctest::Approx(3.0 / 16.0 + 2.0 * 2.0 * 4.0 * 2.0 / 16.0 +
                          std::sqrt(2.0 / 16.0) * (2.0 + 1.0)));
    CHECK_THROWS_AS(bound_value(c, 1), std::invalid_argument);  // composite needs N >= 2

    BoundSpec cs;
    cs.kind = BoundKind::composite_strongly;
    cs.b = 2;
    cs.Q = 1.0;
    cs.mu = 1.0;
    cs.sigma = 0.5;
    cs.dphi = 1.0;
    cs.V1 = 1.0;
    cs.k0 = 8;
    double n = 10.0;
    CHECK(bound_value(cs, 10) == doctest::Approx(1.0 * 64.0 / (n * 11.0) +
                                                 2.0 * 8.0 / (n * 11.0) + 4.0 * 2.0 * 0.25 / 11.0));

    BoundSpec missing;
    missing.kind = BoundKind::strongly;
    missing.b = 2;
    missing.M = {1.0};
    CHECK_THROWS_AS(bound_value(missing, 4), std::invalid_argument);
}

TEST_CASE("bound_value is positive and decreasing in N") {
    std::vector<BoundSpec> specs;
    {
        BoundSpec s;
        s.kind = BoundKind::nonsmooth_a;
        s.D = {2.0, 1.0};
        s.M = {2.0, 2.0};
        specs.push_back(s);
        s.kind = BoundKind::nonsmooth_b_optimalD;
        s.b = 2;
        specs.push_back(s);
        s.kind = BoundKind::strongly;
        s.Q = 1.0;
        s.mu = 0.5;
        specs.push_back(s);
    }
    {
        BoundSpec s;
        s.kind = BoundKind::composite;
        s.b = 4;
        s.L_bar = 2.0;
        s.sigma = 1.5;
        s.D_tilde = 0.7;
        s.dphi = 2.0;
        s.V1 = 1.0;
        specs.push_back(s);
        s.kind = BoundKind::composite_strongly;
        s.Q = 1.0;
        s.mu = 1.0;
        s.k0 = 32;
        specs.push_back(s);
        s.kind = BoundKind::nonconvex_det;
        specs.push_back(s);
        s.kind = BoundKind::nonconvex_stoch;
        s.T = 4;
        specs.push_back(s);
    }
    for (const auto& spec : specs) {
        double prev = bound_value(spec, 2);
        CHECK(prev > 0.0);
        for (long N : {4L, 8L, 16L, 64L, 256L}) {
            double cur = bound_value(spec, N);
            CHECK(cur > 0.0);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("tail bound values and monotonicity") {
    CHECK(tail_bound(1.0) == doctest::Approx(std::exp(-1.0 / 3.0) + std::exp(-1.0)));
    CHECK(tail_bound(1.0) > 1.0);  // vacuous but legitimate
    CHECK(tail_bound(3.0) == doctest::Approx(2.0 * std::exp(-3.0)));
    double prev = tail_bound(0.1);
    for (double lam = 0.2; lam < 12.0; lam += 0.1) {
        double cur = tail_bound(lam);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(tail_bound(0.0), std::invalid_argument);

    // threshold companions evaluate and grow with lambda
    double t1 = tail_threshold_nonsmooth(4, std::sqrt(8.0), std::vector<double>(4, 2.0), 8.0, 200,
                                         1.0);
    double t2 = tail_threshold_nonsmooth(4, std::sqrt(8.0), std::vector<double>(4, 2.0), 8.0, 200,
                                         2.0);
    CHECK(t1 > 0.0);
    CHECK(t2 > t1);
    double s1 = tail_threshold_strongly(4, 2.0, 1.0, 1.0, 8.0, 200, 1.0);
    CHECK(s1 > 0.0);
}

TEST_CASE("aggregate: means, standard errors, quantiles, exceedance") {
    std::vector<RunRecord> same{synthetic_record(4, {{1, 2.0}, {4, 1.0}}),
                                synthetic_record(4, {{1, 2.0}, {4, 1.0}})};
    TrialStats st = aggregate(same, Metric::gap);
    CHECK(st.groups.size() == 1);
    CHECK(st.groups[0].checkpoints[0].mean == 2.0);
    CHECK(*st.groups[0].checkpoints[0].se == 0.0);

    std::vector<RunRecord> two{synthetic_record(4, {{4, 1.0}}), synthetic_record(4, {{4, 3.0}})};
    TrialStats st2 = aggregate(two, Metric::gap, {2.0, 5.0});
    CHECK(st2.groups[0].checkpoints[0].mean == 2.0);
    CHECK(*st2.groups[0].checkpoints[0].se == doctest::Approx(1.0));
    CHECK(st2.groups[0].exceedance[0].frequency == 0.5);
    CHECK(st2.groups[0].exceedance[1].frequency == 0.0);

    // 50 records with uniform gaps: the median lands inside the quartile band
    RngStream rng(31);
    std::vector<RunRecord> uni;
    for (int t = 0; t < 50; ++t) uni.push_back(synthetic_record(8, {{8, rng.uniform01()}}));
    TrialStats su = aggregate(uni, Metric::gap);
    CHECK(su.groups[0].checkpoints[0].q50 >= 0.25);
    CHECK(su.groups[0].checkpoints[0].q50 <= 0.75);
    CHECK(su.groups[0].checkpoints[0].q25 <= su.groups[0].checkpoints[0].q50);
    CHECK(su.groups[0].checkpoints[0].q50 <= su.groups[0].checkpoints[0].q75);

    std::vector<RunRecord> misaligned{synthetic_record(4, {{1, 2.0}, {4, 1.0}}),
                                      synthetic_record(4, {{2, 2.0}, {4, 1.0}})};
    CHECK_THROWS_AS(aggregate(misaligned, Metric::gap), std::invalid_argument);

    std::vector<RunRecord> single{synthetic_record(4, {{4, 1.0}})};
    CHECK_THROWS_AS(aggregate(single, Metric::gap), std::invalid_argument);
    TrialStats ss = aggregate(single, Metric::gap, {}, /*allow_single=*/true);
    CHECK(!ss.groups[0].checkpoints[0].se.has_value());

    CHECK_THROWS_AS(aggregate(same, Metric::pg_norm_sq), std::invalid_argument);
}

TEST_CASE("rate_fit recovers exact power laws") {
    auto stats_for = [](double expo) {
        TrialStats stats;
        for (long N : {10L, 40L, 160L, 640L}) {
            GroupStats g;
            g.N = N;
            g.trials = 2;
            g.checkpoints.push_back({N, 3.0 * std::pow(static_cast<double>(N), expo),
                                     std::nullopt, 0.0, 0.0, 0.0});
            stats.groups.push_back(g);
        }
        return stats;
    };
    RateFit half = rate_fit(stats_for(-0.5));
    CHECK(half.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(half.slope_se <= 1e-12);
    CHECK(!half.clipped);
    RateFit one = rate_fit(stats_for(-1.0));
    CHECK(one.slope == doctest::Approx(-1.0).epsilon(1e-12));

    TrialStats zero;
    for (long N : {10L, 100L, 1000L}) {
        GroupStats g;
        g.N = N;
        g.trials = 2;
        g.checkpoints.push_back({N, 0.0, std::nullopt, 0.0, 0.0, 0.0});
        zero.groups.push_back(g);
    }
    RateFit clipped = rate_fit(zero);
    CHECK(clipped.clipped);

    TrialStats narrow;
    for (long N : {100L, 200L, 400L}) {
        GroupStats g;
        g.N = N;
        g.trials = 2;
        g.checkpoints.push_back({N, 1.0, std::nullopt, 0.0, 0.0, 0.0});
        narrow.groups.push_back(g);
    }
    CHECK_THROWS_AS(rate_fit(narrow), std::invalid_argument);
}
