#include "sbmd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sbmd {

namespace {

double sum_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double sum_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

double need(const std::optional<double>& v, const char* name) {
    if (!v) throw std::invalid_argument(std::string("bound_value: missing constant ") + name);
    return *v;
}

double quantile(std::vector<double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double idx = p * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    double frac = idx - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::nonsmooth_a: return "nonsmooth-a";
        case BoundKind::nonsmooth_b_optimalD: return "nonsmooth-b-optimalD";
        case BoundKind::strongly: return "strongly";
        case BoundKind::composite: return "composite";
        case BoundKind::composite_strongly: return "composite-strongly";
        case BoundKind::nonconvex_det: return "nonconvex-det";
        case BoundKind::nonconvex_stoch: return "nonconvex-stoch";
        case BoundKind::tail_nonsmooth: return "tail-nonsmooth";
        case BoundKind::tail_strongly: return "tail-strongly";
    }
    return "?";
}

std::optional<BoundKind> bound_kind_from_string(const std::string& s) {
    for (BoundKind k :
         {BoundKind::nonsmooth_a, BoundKind::nonsmooth_b_optimalD, BoundKind::strongly,
          BoundKind::composite, BoundKind::composite_strongly, BoundKind::nonconvex_det,
          BoundKind::nonconvex_stoch, BoundKind::tail_nonsmooth, BoundKind::tail_strongly})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

double bound_value(const BoundSpec& spec, long N) {
    if (N < 1) throw std::invalid_argument("bound_value: N must be at least 1");
    const double n = static_cast<double>(N);
    switch (spec.kind) {
        case BoundKind::nonsmooth_a: {
            if (spec.D.empty() || spec.M.size() != spec.D.size())
                throw std::invalid_argument("bound_value: per-block D and M required");
            double s = 0.0;
            for (double d : spec.D) s += std::sqrt(d);
            return std::sqrt(2.0 / n) * s * std::sqrt(sum_sq(spec.M));
        }
        case BoundKind::nonsmooth_b_optimalD: {
            if (spec.b < 1 || spec.D.empty() || spec.M.empty())
                throw std::invalid_argument("bound_value: b, D, M required");
            return std::sqrt(2.0 * sum_sq(spec.M)) * std::sqrt(sum_of(spec.D)) *
                   std::sqrt(static_cast<double>(spec.b) / n);
        }
        case BoundKind::strongly: {
            if (spec.b < 1 || spec.M.empty()) throw std::invalid_argument("bound_value: b, M required");
            double Q = need(spec.Q, "Q"), mu = need(spec.mu, "mu");
            return 2.0 * spec.b * Q / (mu * (n + 1.0)) * sum_sq(spec.M);
        }
        case BoundKind::composite: {
            if (N < 2) throw std::invalid_argument("bound_value: composite kinds need N >= 2");
            if (spec.b < 1) throw std::invalid_argument("bound_value: b required");
            double L = need(spec.L_bar, "L_bar"), sigma = need(spec.sigma, "sigma");
            double Dt = need(spec.D_tilde, "D_tilde"), dphi = need(spec.dphi, "dphi");
            double V1 = need(spec.V1, "V1");
            return (spec.b - 1.0) * dphi / n + 2.0 * spec.b * L * V1 / n +
                   sigma * std::sqrt(spec.b / n) * (V1 / Dt + Dt);
        }
        case BoundKind::composite_strongly: {
            if (N < 2) throw std::invalid_argument("bound_value: composite kinds need N >= 2");
            if (spec.b < 1) throw std::invalid_argument("bound_value: b required");
            double Q = need(spec.Q, "Q"), mu = need(spec.mu, "mu");
            double sigma = need(spec.sigma, "sigma"), dphi = need(spec.dphi, "dphi");
            double V1 = need(spec.V1, "V1");
            long k0;
            if (spec.k0) {
                k0 = *spec.k0;
            } else {
                double L = need(spec.L_bar, "k0 or L_bar");
                k0 = static_cast<long>(std::floor(4.0 * spec.b * Q * L / mu));
            }
            if (k0 < 1) throw std::invalid_argument("bound_value: k0 must be at least 1");
            double k0d = static_cast<double>(k0);
            return mu * Q * k0d * k0d / (n * (n + 1.0)) * V1 +
                   2.0 * Q * (spec.b - 1.0) * k0d / (n * (n + 1.0)) * dphi +
                   4.0 * spec.b * sigma * sigma / (mu * Q * (n + 1.0));
        }
        case BoundKind::nonconvex_det: {
            if (spec.b < 1) throw std::invalid_argument("bound_value: b required");
            return 2.0 * spec.b * need(spec.L_bar, "L_bar") * need(spec.dphi, "dphi") / n;
        }
        case BoundKind::nonconvex_stoch: {
            if (spec.b < 1) throw std::invalid_argument("bound_value: b required");
            if (!spec.T || *spec.T < 1) throw std::invalid_argument("bound_value: T required");
            double sigma = need(spec.sigma, "sigma");
            // 4 b sigma^2 / T: the larger of the two equivalent noise-term forms
            return 2.0 * spec.b * need(spec.L_bar, "L_bar") * need(spec.dphi, "dphi") / n +
                   4.0 * spec.b * sigma * sigma / static_cast<double>(*spec.T);
        }
        case BoundKind::tail_nonsmooth: {
            if (spec.b < 1 || spec.M.empty() || spec.D.empty())
                throw std::invalid_argument("bound_value: b, M, D required");
            return tail_threshold_nonsmooth(spec.b, need(spec.D_tilde, "D_tilde"), spec.M,
                                            sum_of(spec.D), N, need(spec.lambda, "lambda"));
        }
        case BoundKind::tail_strongly: {
            if (spec.b < 1 || spec.M.empty() || spec.D.empty())
                throw std::invalid_argument("bound_value: b, M, D required");
            return tail_threshold_strongly(spec.b, max_of(spec.M), need(spec.Q, "Q"),
                                           need(spec.mu, "mu"), sum_of(spec.D), N,
                                           need(spec.lambda, "lambda"));
        }
    }
    throw std::invalid_argument("bound_value: unknown kind");
}

double tail_bound(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("tail_bound: lambda must be positive");
    return std::exp(-lambda * lambda / 3.0) + std::exp(-lambda);
}

double tail_threshold_nonsmooth(int b, double D_tilde, const std::vector<double>& M, double sum_D,
                                long N, double lambda) {
    if (b < 1 || !(D_tilde > 0.0) || N < 1 || !(lambda > 0.0))
        throw std::invalid_argument("tail threshold: bad parameters");
    const double bd = static_cast<double>(b), n = static_cast<double>(N);
    const double Dt2 = D_tilde * D_tilde;
    const double M2 = sum_sq(M);
    const double Mbar = max_of(M);
    double term1 = bd * std::sqrt(M2) / std::sqrt(2.0 * n * bd * Dt2) *
                   (2.0 * bd * Dt2 + sum_D + 2.0 * lambda * bd * Dt2);
    double term2 = 32.0 * lambda * std::pow(bd, 2.5) * Mbar * Mbar * sum_D /
                   std::sqrt(n * bd * Dt2);
    return term1 + term2;
}

double tail_threshold_strongly(int b, double M_bar, double Q, double mu, double sum_D, long N,
                               double lambda) {
    if (b < 1 || !(mu > 0.0) || N < 1 || !(lambda > 0.0))
        throw std::invalid_argument("tail threshold: bad parameters");
    const double bd = static_cast<double>(b), n = static_cast<double>(N);
    return 4.0 * (1.0 + lambda) * bd * bd * M_bar * M_bar * Q / ((n + 1.0) * mu) +
           64.0 * lambda * bd * bd * M_bar * M_bar * sum_D / std::sqrt(3.0 * n);
}

TrialStats aggregate(const std::vector<RunRecord>& records, Metric metric,
                     const std::vector<double>& exceedance_thresholds, bool allow_single) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    std::map<long, std::vector<const RunRecord*>> by_N;
    for (const auto& r : records) by_N[r.N].push_back(&r);

    auto metric_at = [&](const RunRecord& r, std::size_t ci) {
        const Checkpoint& c = r.checkpoints.at(ci);
        if (metric == Metric::gap) return c.gap;
        if (!c.pg_norm_sq) throw std::invalid_argument("aggregate: record lacks |PG|^2 values");
        return *c.pg_norm_sq;
    };

    TrialStats stats;
    for (auto& [N, group] : by_N) {
        const std::size_t n_trials = group.size();
        if (n_trials < 2 && !allow_single)
            throw std::invalid_argument("aggregate: at least two aligned records required per N");
        const auto& ref = group.front()->checkpoints;
        for (const auto* r : group) {
            if (r->checkpoints.size() != ref.size())
                throw std::invalid_argument("aggregate: misaligned checkpoints");
            for (std::size_t ci = 0; ci < ref.size(); ++ci)
                if (r->checkpoints[ci].k != ref[ci].k)
                    throw std::invalid_argument("aggregate: misaligned checkpoints");
        }

        GroupStats gs;
        gs.N = N;
        gs.trials = static_cast<int>(n_trials);
        for (std::size_t ci = 0; ci < ref.size(); ++ci) {
            std::vector<double> vals;
            vals.reserve(n_trials);
            for (const auto* r : group) vals.push_back(metric_at(*r, ci));
            double mean = sum_of(vals) / static_cast<double>(n_trials);
            CheckpointStats cs;
            cs.k = ref[ci].k;
            cs.mean = mean;
            if (n_trials >= 2) {
                double ss = 0.0;
                for (double v : vals) ss += (v - mean) * (v - mean);
                double sd = std::sqrt(ss / static_cast<double>(n_trials - 1));
                cs.se = sd / std::sqrt(static_cast<double>(n_trials));
            }
            std::sort(vals.begin(), vals.end());
            cs.q25 = quantile(vals, 0.25);
            cs.q50 = quantile(vals, 0.50);
            cs.q75 = quantile(vals, 0.75);
            gs.checkpoints.push_back(cs);
        }
        for (double t : exceedance_thresholds) {
            std::size_t count = 0;
            std::size_t last = ref.size() - 1;
            for (const auto* r : group)
                if (metric_at(*r, last) >= t) ++count;
            double f = static_cast<double>(count) / static_cast<double>(n_trials);
            gs.exceedance.push_back(
                {t, f, std::sqrt(f * (1.0 - f) / static_cast<double>(n_trials))});
        }
        stats.groups.push_back(std::move(gs));
    }
    return stats;
}

RateFit rate_fit(const TrialStats& stats) {
    const std::size_t m = stats.groups.size();
    if (m < 3) throw std::invalid_argument("rate_fit: at least three N values required");
    double lo = stats.groups.front().N, hi = stats.groups.back().N;
    if (hi / lo < 10.0) throw std::invalid_argument("rate_fit: N grid must span at least a decade");

    RateFit fit;
    std::vector<double> xs, ys;
    for (const auto& g : stats.groups) {
        double gap = g.final_checkpoint().mean;
        if (gap < 1e-16) {
            gap = 1e-16;
            fit.clipped = true;
        }
        xs.push_back(std::log(static_cast<double>(g.N)));
        ys.push_back(std::log(gap));
    }
    double xbar = sum_of(xs) / static_cast<double>(m);
    double ybar = sum_of(ys) / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double r = ys[i] - ybar - fit.slope * (xs[i] - xbar);
        ss_res += r * r;
    }
    fit.slope_se = m > 2 ? std::sqrt(ss_res / static_cast<double>(m - 2) / sxx) : 0.0;
    return fit;
}

}  // namespace sbmd
