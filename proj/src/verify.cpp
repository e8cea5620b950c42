#include "sbmd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbmd/analysis.hpp"
#include "sbmd/averaging.hpp"
#include "sbmd/plans.hpp"
#include "sbmd/solvers.hpp"

namespace sbmd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double raw_bregman(const BlockGeometry& geom, std::span<const double> v,
                   std::span<const double> u) {
    if (geom.kind() == GeomKind::entropy_simplex) {
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            double vj = std::max(v[j], 1e-300);
            if (u[j] > 0.0) s += u[j] * std::log(u[j] / vj);
        }
        return s;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += (u[j] - v[j]) * (u[j] - v[j]);
    return 0.5 * s;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << v;
    return ss.str();
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

double prox_objective(const BlockGeometry& geom, std::span<const double> v,
                      std::span<const double> y, double gamma, const RegularizerTerm& chi,
                      std::span<const double> u) {
    double lin = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) lin += y[j] * u[j];
    return lin + raw_bregman(geom, v, u) / gamma + chi.eval(u);
}

ProxFn closed_form_prox() {
    return [](const BlockGeometry& geom, std::span<const double> v, std::span<const double> y,
              double gamma, const RegularizerTerm& chi) {
        return composite_prox_step(geom, v, y, gamma, chi);
    };
}

double prox_optimality_residual(const BlockGeometry& geom, std::span<const double> v,
                                std::span<const double> y, double gamma,
                                const RegularizerTerm& chi, std::span<const double> u) {
    const bool l1 = chi.kind == RegularizerTerm::Kind::l1;
    const double lam = l1 ? chi.weight : 0.0;
    const std::size_t d = u.size();
    std::vector<double> grad(d);  // gradient of the smooth part at u
    if (geom.kind() == GeomKind::entropy_simplex) {
        double nu_sum = 0.0;
        std::size_t healthy = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (u[j] < 1e-250) continue;  // not smooth there
            grad[j] = y[j] + std::log(u[j] / std::max(v[j], 1e-300)) / gamma;
            nu_sum += grad[j];
            ++healthy;
        }
        if (healthy == 0) return 0.0;
        double nu = -nu_sum / static_cast<double>(healthy);
        double res = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            if (u[j] >= 1e-250) res = std::max(res, std::abs(grad[j] + nu));
        return res;
    }

    for (std::size_t j = 0; j < d; ++j) grad[j] = y[j] + (u[j] - v[j]) / gamma;

    if (geom.kind() == GeomKind::euclidean_box) {
        double res = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            // -grad_j must lie in lam*d|u_j| + N_[l,u](u_j), an interval [A,B].
            double A, B;
            if (l1 && u[j] == 0.0) {
                A = -lam;
                B = lam;
            } else {
                double s = l1 ? lam * (u[j] > 0.0 ? 1.0 : -1.0) : 0.0;
                A = B = s;
            }
            if (u[j] <= geom.lower()[j]) A = -kInf;
            if (u[j] >= geom.upper()[j]) B = kInf;
            double target = -grad[j];
            res = std::max(res, std::max(0.0, std::max(A - target, target - B)));
        }
        return res;
    }

    // Ball. Interior: unconstrained stationarity; boundary: one multiplier.
    double ru2 = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        ru2 += (u[j] - geom.center()[j]) * (u[j] - geom.center()[j]);
    double ru = std::sqrt(ru2);
    const bool boundary = ru >= geom.radius() * (1.0 - 1e-9);
    double res = 0.0;
    std::vector<double> w(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (l1 && u[j] == 0.0) {
            // center is the origin for composite balls, so this coordinate
            // decouples from the multiplier term
            res = std::max(res, std::max(0.0, std::abs(grad[j]) - lam));
        } else {
            w[j] = grad[j] + (l1 ? lam * (u[j] > 0.0 ? 1.0 : -1.0) : 0.0);
        }
    }
    if (!boundary) {
        for (std::size_t j = 0; j < d; ++j)
            if (!(l1 && u[j] == 0.0)) res = std::max(res, std::abs(w[j]));
        return res;
    }
    double inner = 0.0;
    for (std::size_t j = 0; j < d; ++j) inner += w[j] * (u[j] - geom.center()[j]);
    double nu = std::max(0.0, -inner / ru2);
    for (std::size_t j = 0; j < d; ++j)
        if (!(l1 && u[j] == 0.0))
            res = std::max(res, std::abs(w[j] + nu * (u[j] - geom.center()[j])));
    return res;
}

namespace {

struct ProxCase {
    BlockGeometry geom;
    std::vector<double> v, y;
    double gamma;
    RegularizerTerm chi;
};

ProxCase random_case(GeomKind kind, int index, RngStream& rng, bool with_regularizer) {
    const int dim = (kind == GeomKind::entropy_simplex)
                        ? (index % 16 == 15 ? 3 : 2)
                        : (index % 8 == 7 ? 2 : 1);
    const bool composite = with_regularizer && kind != GeomKind::entropy_simplex && index % 2 == 1;

    std::vector<double> v(static_cast<std::size_t>(dim)), y(static_cast<std::size_t>(dim));
    for (auto& t : y) t = rng.uniform(-3.0, 3.0);
    double gamma = std::exp(rng.uniform(std::log(0.05), std::log(2.0)));
    RegularizerTerm chi =
        composite ? RegularizerTerm::l1(rng.uniform(0.0, 1.0)) : RegularizerTerm::zero();

    switch (kind) {
        case GeomKind::euclidean_box: {
            std::vector<double> lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
            for (int j = 0; j < dim; ++j) {
                std::size_t k = static_cast<std::size_t>(j);
                lo[k] = rng.uniform(-2.0, 0.5);
                hi[k] = lo[k] + rng.uniform(0.2, 2.5);
                v[k] = rng.uniform(lo[k], hi[k]);
            }
            return {BlockGeometry::box(std::move(lo), std::move(hi)), std::move(v), std::move(y),
                    gamma, chi};
        }
        case GeomKind::euclidean_ball: {
            std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
            if (!composite)
                for (auto& t : c) t = rng.uniform(-1.0, 1.0);
            double r = rng.uniform(0.3, 2.0);
            for (;;) {  // rejection sample v inside the ball
                double d2 = 0.0;
                for (int j = 0; j < dim; ++j) {
                    std::size_t k = static_cast<std::size_t>(j);
                    v[k] = rng.uniform(-r, r);
                    d2 += v[k] * v[k];
                }
                if (d2 <= r * r) break;
            }
            for (int j = 0; j < dim; ++j) v[static_cast<std::size_t>(j)] += c[static_cast<std::size_t>(j)];
            return {BlockGeometry::ball(std::move(c), r), std::move(v), std::move(y), gamma, chi};
        }
        case GeomKind::entropy_simplex: {
            double total = 0.0;
            for (auto& t : v) {
                t = rng.uniform(0.05, 1.0);
                total += t;
            }
            for (auto& t : v) t /= total;
            return {BlockGeometry::simplex(dim), std::move(v), std::move(y), gamma, chi};
        }
    }
    throw std::logic_error("unreachable");
}

// Minimum of the prox objective over a grid of relative resolution 1e-3.
double grid_minimum(const ProxCase& c) {
    const int steps = 1000;
    const BlockGeometry& g = c.geom;
    double best = kInf;
    auto consider = [&](std::span<const double> u) {
        best = std::min(best, prox_objective(g, c.v, c.y, c.gamma, c.chi, u));
    };

    if (g.kind() == GeomKind::euclidean_box) {
        if (g.dim() == 1) {
            double u[1];
            for (int i = 0; i <= steps; ++i) {
                u[0] = g.lower()[0] + (g.upper()[0] - g.lower()[0]) * i / steps;
                consider(u);
            }
        } else {
            double u[2];
            for (int i = 0; i <= steps; ++i) {
                u[0] = g.lower()[0] + (g.upper()[0] - g.lower()[0]) * i / steps;
                for (int j = 0; j <= steps; ++j) {
                    u[1] = g.lower()[1] + (g.upper()[1] - g.lower()[1]) * j / steps;
                    consider(u);
                }
            }
        }
        return best;
    }
    if (g.kind() == GeomKind::euclidean_ball) {
        const double r = g.radius();
        if (g.dim() == 1) {
            double u[1];
            for (int i = 0; i <= steps; ++i) {
                u[0] = g.center()[0] - r + 2.0 * r * i / steps;
                consider(u);
            }
        } else {
            double u[2];
            for (int i = 0; i <= steps; ++i) {
                u[0] = g.center()[0] - r + 2.0 * r * i / steps;
                double dx = u[0] - g.center()[0];
                for (int j = 0; j <= steps; ++j) {
                    u[1] = g.center()[1] - r + 2.0 * r * j / steps;
                    double dy = u[1] - g.center()[1];
                    if (dx * dx + dy * dy <= r * r) consider(u);
                }
            }
        }
        return best;
    }
    // Simplex.
    if (g.dim() == 2) {
        double u[2];
        for (int i = 0; i <= steps; ++i) {
            u[0] = static_cast<double>(i) / steps;
            u[1] = 1.0 - u[0];
            consider(u);
        }
    } else {
        double u[3];
        for (int i = 0; i <= steps; ++i) {
            u[0] = static_cast<double>(i) / steps;
            for (int j = 0; j + i <= steps; ++j) {
                u[1] = static_cast<double>(j) / steps;
                u[2] = 1.0 - u[0] - u[1];
                consider(u);
            }
        }
    }
    return best;
}

}  // namespace

ProxGridReport prox_grid_report(GeomKind kind, int cases, std::uint64_t seed, const ProxFn& fn,
                                bool with_regularizer) {
    RngStream rng(seed);
    ProxGridReport report;
    report.cases = cases;
    report.max_excess = -kInf;
    for (int idx = 0; idx < cases; ++idx) {
        ProxCase c = random_case(kind, idx, rng, with_regularizer);
        std::vector<double> u = fn(c.geom, c.v, c.y, c.gamma, c.chi);
        double excess = prox_objective(c.geom, c.v, c.y, c.gamma, c.chi, u) - grid_minimum(c);
        report.max_excess = std::max(report.max_excess, excess);
        report.max_residual = std::max(
            report.max_residual, prox_optimality_residual(c.geom, c.v, c.y, c.gamma, c.chi, u));
    }
    return report;
}

double averaging_equivalence_max_error(int cases, std::uint64_t seed) {
    RngStream rng(seed);
    double worst = 0.0;
    for (int idx = 0; idx < cases; ++idx) {
        const int b = 1 + static_cast<int>(rng.uniform01() * 5.0);
        std::vector<int> sizes;
        for (int i = 0; i < b; ++i) sizes.push_back(1 + static_cast<int>(rng.uniform01() * 3.0));
        auto structure = BlockStructure::of(sizes);
        const int N = 1 + static_cast<int>(rng.uniform01() * 50.0);

        std::vector<double> theta(static_cast<std::size_t>(N));
        for (auto& t : theta) t = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(0.0, 2.0);
        theta[static_cast<std::size_t>(N - 1)] += 0.5;  // keep the total positive

        AveragingState avg(structure, theta);
        BlockVector x = BlockVector::zeros(structure);
        for (auto& v : x.values()) v = rng.uniform(-1.0, 1.0);

        std::vector<std::vector<double>> trajectory;
        for (int k = 1; k <= N; ++k) {
            trajectory.push_back(x.values());
            int i_k = static_cast<int>(rng.uniform01() * b);
            avg.update(i_k, x, k);
            for (auto& v : x.block(i_k)) v = rng.uniform(-1.0, 1.0);
        }
        BlockVector incremental = avg.finalize(x, N);

        std::vector<double> direct(x.values().size(), 0.0);
        double total = 0.0;
        for (int k = 0; k < N; ++k) {
            total += theta[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < direct.size(); ++j)
                direct[j] += theta[static_cast<std::size_t>(k)] * trajectory[static_cast<std::size_t>(k)][j];
        }
        double scale = 0.0, err = 0.0;
        for (std::size_t j = 0; j < direct.size(); ++j) {
            direct[j] /= total;
            scale = std::max(scale, std::abs(direct[j]));
            err = std::max(err, std::abs(direct[j] - incremental.values()[j]));
        }
        worst = std::max(worst, err / std::max(scale, 1.0));
    }
    return worst;
}

double estimator_unbiasedness_max_sigmas(const StochasticProblem& problem, int points, long draws,
                                         std::uint64_t seed) {
    const std::vector<double> uniform(static_cast<std::size_t>(problem.structure().block_count()),
                                      1.0 / problem.structure().block_count());
    return estimator_unbiasedness_max_sigmas(problem, points, draws, seed, uniform);
}

double estimator_unbiasedness_max_sigmas(const StochasticProblem& problem, int points, long draws,
                                         std::uint64_t seed, const std::vector<double>& p) {
    RngStream rng(seed);
    const int b = problem.structure().block_count();
    const int n = problem.structure().dim();
    if (static_cast<int>(p.size()) != b)
        throw std::invalid_argument("estimator check: probability vector length mismatch");
    double worst = 0.0;

    for (int pt = 0; pt < points; ++pt) {
        BlockVector x = BlockVector::zeros(problem.structure_ptr());
        for (int i = 0; i < b; ++i) {
            const BlockGeometry& g = problem.setup().geometry(i);
            auto blk = x.block(i);
            for (std::size_t j = 0; j < blk.size(); ++j) {
                double lo = g.lower().empty() ? -2.0 : std::max(g.lower()[j], -2.0);
                double hi = g.upper().empty() ? 2.0 : std::min(g.upper()[j], 2.0);
                blk[j] = rng.uniform(lo, hi);
            }
        }

        std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
        std::vector<double> m2(static_cast<std::size_t>(n), 0.0);
        std::vector<double> buf;
        for (long t = 0; t < draws; ++t) {
            int i = rng.categorical(p);
            Sample s = problem.sample(rng);
            buf.resize(static_cast<std::size_t>(problem.structure().block_size(i)));
            problem.stoch_subgrad_block(x, s, i, buf);
            int off = problem.structure().block_offset(i);
            // estimator e = p_i^{-1} U_i G_i: zero off-block, G/p_i on block i
            double inv_p = 1.0 / p[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) {
                double e = 0.0;
                if (j >= off && j < off + problem.structure().block_size(i))
                    e = inv_p * buf[static_cast<std::size_t>(j - off)];
                double delta = e - mean[static_cast<std::size_t>(j)];
                mean[static_cast<std::size_t>(j)] += delta / static_cast<double>(t + 1);
                m2[static_cast<std::size_t>(j)] += delta * (e - mean[static_cast<std::size_t>(j)]);
            }
        }

        std::vector<double> g(static_cast<std::size_t>(n));
        problem.grad_exact(x, g);
        for (int j = 0; j < n; ++j) {
            std::size_t k = static_cast<std::size_t>(j);
            double se = std::sqrt(m2[k] / static_cast<double>(draws - 1) / static_cast<double>(draws));
            double dev = std::abs(mean[k] - g[k]);
            if (se == 0.0) {
                if (dev > 1e-14) return kInf;
                continue;
            }
            worst = std::max(worst, dev / se);
        }
    }
    return worst;
}

namespace {

CheckResult check(const std::string& name, bool pass, const std::string& detail) {
    return {name, pass, detail};
}

CheckResult check_prox_grid(GeomKind kind, const std::string& label, int cases,
                            std::uint64_t seed) {
    ProxGridReport r = prox_grid_report(kind, cases, seed, closed_form_prox());
    bool pass = r.max_excess <= 1e-3 && r.max_residual <= 1e-9;
    return check("prox grid oracle (" + label + ")", pass,
                 "cases=" + std::to_string(r.cases) + " max_excess=" + fmt(r.max_excess) +
                     " max_residual=" + fmt(r.max_residual));
}

CheckResult check_sure_bound(const StochasticProblem& problem, std::uint64_t seed) {
    RngStream rng(seed);
    const auto& M = *problem.M();
    long violations = 0;
    std::vector<double> buf;
    for (int t = 0; t < 10000; ++t) {
        BlockVector x = BlockVector::zeros(problem.structure_ptr());
        for (int i = 0; i < problem.structure().block_count(); ++i) {
            const BlockGeometry& g = problem.setup().geometry(i);
            auto blk = x.block(i);
            for (std::size_t j = 0; j < blk.size(); ++j) blk[j] = rng.uniform(g.lower()[j], g.upper()[j]);
        }
        Sample s = problem.sample(rng);
        for (int i = 0; i < problem.structure().block_count(); ++i) {
            buf.resize(static_cast<std::size_t>(problem.structure().block_size(i)));
            problem.stoch_subgrad_block(x, s, i, buf);
            double norm2 = 0.0;
            for (double v : buf) norm2 += v * v;
            if (norm2 > M[static_cast<std::size_t>(i)] * M[static_cast<std::size_t>(i)] * (1.0 + 1e-12))
                ++violations;
        }
    }
    return check("sure bound |G_i|^2 <= M_i^2 (" + problem.name() + ")", violations == 0,
                 "violations=" + std::to_string(violations) + "/10000");
}

CheckResult check_smoothness(const StochasticProblem& problem, std::uint64_t seed) {
    RngStream rng(seed);
    const auto& L = *problem.L();
    double worst_ratio = 0.0;
    std::vector<double> g1, g2;
    for (int t = 0; t < 10000; ++t) {
        BlockVector x = BlockVector::zeros(problem.structure_ptr());
        for (auto& v : x.values()) v = rng.uniform(-2.0, 2.0);
        int i = static_cast<int>(rng.uniform01() * problem.structure().block_count());
        std::size_t ni = static_cast<std::size_t>(problem.structure().block_size(i));
        g1.resize(ni);
        g2.resize(ni);
        problem.grad_block_exact(x, i, g1);
        BlockVector xp = x;
        double rho2 = 0.0;
        for (auto& v : xp.block(i)) {
            double r = rng.uniform(-0.5, 0.5);
            v += r;
            rho2 += r * r;
        }
        problem.grad_block_exact(xp, i, g2);
        double diff2 = 0.0;
        for (std::size_t j = 0; j < ni; ++j) diff2 += (g2[j] - g1[j]) * (g2[j] - g1[j]);
        if (rho2 > 0.0)
            worst_ratio = std::max(worst_ratio,
                                   std::sqrt(diff2) / (L[static_cast<std::size_t>(i)] * std::sqrt(rho2)));
    }

    // Central finite differences of f vs the analytic gradient.
    double worst_fd = 0.0;
    std::vector<double> g(static_cast<std::size_t>(problem.structure().dim()));
    for (int t = 0; t < 5; ++t) {
        BlockVector x = BlockVector::zeros(problem.structure_ptr());
        for (auto& v : x.values()) v = rng.uniform(-1.5, 1.5);
        problem.grad_exact(x, g);
        for (int j = 0; j < problem.structure().dim(); ++j) {
            const double h = 1e-6;
            BlockVector xp = x, xm = x;
            xp.values()[static_cast<std::size_t>(j)] += h;
            xm.values()[static_cast<std::size_t>(j)] -= h;
            double fd = (problem.objective(xp) - problem.objective(xm)) / (2.0 * h);
            double err = std::abs(fd - g[static_cast<std::size_t>(j)]) /
                         std::max(1.0, std::abs(g[static_cast<std::size_t>(j)]));
            worst_fd = std::max(worst_fd, err);
        }
    }
    bool pass = worst_ratio <= 1.0 + 1e-9 && worst_fd <= 1e-6;
    return check("smoothness and gradient (" + problem.name() + ")", pass,
                 "max |dg|/(L|rho|)=" + fmt(worst_ratio) + " max FD err=" + fmt(worst_fd));
}

CheckResult check_noise_moment(const StochasticProblem& problem, std::uint64_t seed) {
    RngStream rng(seed);
    const auto& sigma = *problem.sigma();
    BlockVector x = BlockVector::zeros(problem.structure_ptr());
    for (auto& v : x.values()) v = rng.uniform(-1.0, 1.0);
    const long draws = 100000;
    bool pass = true;
    std::ostringstream detail;
    std::vector<double> g, buf;
    for (int i = 0; i < problem.structure().block_count(); ++i) {
        std::size_t ni = static_cast<std::size_t>(problem.structure().block_size(i));
        g.resize(ni);
        buf.resize(ni);
        problem.grad_block_exact(x, i, g);
        double acc = 0.0;
        for (long t = 0; t < draws; ++t) {
            Sample s = problem.sample(rng);
            problem.stoch_subgrad_block(x, s, i, buf);
            double d2 = 0.0;
            for (std::size_t j = 0; j < ni; ++j) d2 += (buf[j] - g[j]) * (buf[j] - g[j]);
            acc += d2;
        }
        double second = acc / static_cast<double>(draws);
        double cap = sigma[static_cast<std::size_t>(i)] * sigma[static_cast<std::size_t>(i)];
        if (cap == 0.0 ? second != 0.0 : second > cap * 1.05) pass = false;
        if (i == 0) detail << "block0 E|G-g|^2=" << fmt(second) << " sigma^2=" << fmt(cap);
    }
    return check("noise second moment (" + problem.name() + ")", pass, detail.str());
}

CheckResult check_plan_identities() {
    bool pass = true;
    std::ostringstream detail;
    {
        const int b = 2, N = 64;
        const double Q = 1.0, mu = 1.0;
        StepsizePlan plan = plan_strongly(b, Q, mu, N);
        double worst = 0.0, sum_theta = 0.0;
        for (int k = 1; k <= N; ++k) {
            worst = std::max(worst, std::abs(plan.Gamma(k) - 2.0 / (k * (k + 1.0))));
            worst = std::max(worst, std::abs(plan.theta(k) - b * k * Q / mu));
            sum_theta += plan.theta(k);
        }
        worst = std::max(worst, std::abs(sum_theta - b * Q * N * (N + 1.0) / (2.0 * mu)));
        if (worst > 1e-9) pass = false;
        detail << "strongly closed-form dev=" << fmt(worst);
    }
    {
        const int b = 2, N = 64;
        const double Q = 1.0, mu = 1.0, L = 1.0;
        StepsizePlan plan = plan_composite_strongly(b, Q, mu, L, N);
        const double k0 = static_cast<double>(*plan.meta().k0);
        double worst = 0.0;
        for (int k = 1; k <= N; ++k) {
            double closed = k0 * (k0 + 1.0) / ((k + k0) * (k + k0 - 1.0));
            worst = std::max(worst, std::abs(plan.Gamma(k) - closed));
            double lower = 2.0 * b * k / (mu * Q * k0 * (k0 + 1.0));
            if (plan.theta(k + 1) < lower * (1.0 - 1e-12)) worst = kInf;
        }
        if (worst > 1e-9) pass = false;
        detail << " composite-strongly dev=" << fmt(worst);
    }
    return check("stepsize plan identities", pass, detail.str());
}

CheckResult check_lemma_inequality(std::uint64_t seed) {
    auto problem = make_p4_nonconvex(8, 4, 0.1, 0.5, -1.0, 1.0);
    double worst = -kInf;
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> p(4, 0.25);
        StepsizePlan plan = plan_nonconvex(*problem->L(), p, 64);
        TrialRng rng(seed, static_cast<std::uint64_t>(trial));
        BlockVector x1 = BlockVector::constant(problem->structure_ptr(), 0.7);
        RunRecord rec = sbmd_nonconvex_run(*problem, problem->setup(), plan, x1, 64, 4, rng, seed,
                                           /*check_lemma=*/true);
        worst = std::max(worst, *rec.lemma_slack_max);
    }
    return check("projected-gradient inequality on nonconvex runs", worst <= 1e-9,
                 "max slack=" + fmt(worst));
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    std::vector<CheckResult> checks;
    checks.push_back(check_prox_grid(GeomKind::euclidean_box, "box", 60, seed + 1));
    checks.push_back(check_prox_grid(GeomKind::euclidean_ball, "ball", 60, seed + 2));
    checks.push_back(check_prox_grid(GeomKind::entropy_simplex, "simplex, incl. dim-3", 48, seed + 3));

    double avg_err = averaging_equivalence_max_error(100, seed + 4);
    checks.push_back(check("incremental averaging vs direct recomputation", avg_err <= 1e-12,
                           "max rel err=" + fmt(avg_err)));

    auto p1 = make_p1_nonsmooth(8, 4, 0.5, -1.0, 1.0, 0.25);
    auto p2 = make_p2_strongly(8, 4, 0.5, 1.0, -1.0, 1.0, 0.25);
    auto p3 = make_p3_composite(std::vector<double>{1.0, 2.0, 3.0, 4.0, 1.5, 2.5, 3.5, 0.5},
                                std::vector<double>(8, 1.0), 4, 0.5, 1.0);
    auto p4 = make_p4_nonconvex(8, 4, 0.1, 1.0, -1.0, 1.0);
    for (const auto& problem : {p1, p2, p3, p4}) {
        double sigmas = estimator_unbiasedness_max_sigmas(*problem, 3, 100000, seed + 5);
        checks.push_back(check("unbiased block estimator (" + problem->name() + ")", sigmas <= 4.0,
                               "max |mean-g|/SE=" + fmt(sigmas)));
    }
    checks.push_back(check_sure_bound(*p1, seed + 6));
    checks.push_back(check_sure_bound(*p2, seed + 7));
    checks.push_back(check_smoothness(*p3, seed + 8));
    checks.push_back(check_smoothness(*p4, seed + 9));
    checks.push_back(check_noise_moment(*p3, seed + 10));
    checks.push_back(check_noise_moment(*p4, seed + 11));
    checks.push_back(check_plan_identities());
    checks.push_back(check_lemma_inequality(seed + 12));
    return checks;
}

}  // namespace sbmd
