#include "sbmd/plans.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbmd {

std::string to_string(PlanKind kind) {
    switch (kind) {
        case PlanKind::nonsmooth_a: return "nonsmooth-a";
        case PlanKind::nonsmooth_b: return "nonsmooth-b";
        case PlanKind::strongly_convex: return "strongly";
        case PlanKind::composite: return "composite";
        case PlanKind::composite_strongly: return "composite-strongly";
        case PlanKind::nonconvex: return "nonconvex";
    }
    return "?";
}

void StepsizePlan::validate(const std::vector<double>& L) const {
    if (gamma_.empty()) throw std::invalid_argument("plan: horizon must be at least 1");
    for (double g : gamma_)
        if (!(g > 0.0)) throw std::invalid_argument("plan: stepsizes must be positive");
    for (double t : theta_)
        if (!(t >= 0.0)) throw std::invalid_argument("plan: weights must be nonnegative");
    if (p_.empty()) throw std::invalid_argument("plan: probability vector must be non-empty");
    double ps = 0.0;
    for (double q : p_) {
        if (!(q > 0.0)) throw std::invalid_argument("plan: probabilities must be positive");
        ps += q;
    }
    if (std::abs(ps - 1.0) > 1e-12) throw std::invalid_argument("plan: probabilities must sum to 1");

    const int N = horizon();
    const bool composite_kind = kind_ == PlanKind::composite || kind_ == PlanKind::composite_strongly;
    const std::size_t want_theta = composite_kind ? static_cast<std::size_t>(N + 1)
                                                  : static_cast<std::size_t>(N);
    if (kind_ != PlanKind::nonconvex && theta_.size() != want_theta)
        throw std::invalid_argument("plan: weight array length mismatch");
    if (composite_kind && theta_[0] != 0.0)
        throw std::invalid_argument("plan: composite kinds require theta_1 = 0");

    const double b = static_cast<double>(p_.size());
    switch (kind_) {
        case PlanKind::strongly_convex: {
            if (!meta_.mu || !meta_.Q) throw std::invalid_argument("plan: mu and Q required");
            double cap = b * *meta_.Q / *meta_.mu;
            for (double g : gamma_)
                if (g > cap * (1.0 + 1e-12))
                    throw std::invalid_argument("plan: gamma exceeds bQ/mu");
            break;
        }
        case PlanKind::composite:
        case PlanKind::composite_strongly: {
            if (!meta_.L_bar) throw std::invalid_argument("plan: L_bar required");
            double cap = 0.5 / *meta_.L_bar;
            for (double g : gamma_)
                if (g > cap * (1.0 + 1e-12))
                    throw std::invalid_argument("plan: gamma exceeds 1/(2 L_bar)");
            if (kind_ == PlanKind::composite_strongly) {
                if (!meta_.mu || !meta_.Q) throw std::invalid_argument("plan: mu and Q required");
                double cap2 = b * *meta_.Q / *meta_.mu;
                for (double g : gamma_)
                    if (g > cap2 * (1.0 + 1e-12))
                        throw std::invalid_argument("plan: gamma exceeds bQ/mu");
            }
            break;
        }
        case PlanKind::nonconvex: {
            if (L.size() != p_.size()) throw std::invalid_argument("plan: per-block L required");
            for (double l : L)
                for (double g : gamma_)
                    if (!(g < 2.0 / l)) throw std::invalid_argument("plan: gamma must stay below 2/L_i");
            if (output_weights_.size() != static_cast<std::size_t>(N))
                throw std::invalid_argument("plan: output weights length mismatch");
            double ws = 0.0;
            for (double w : output_weights_) {
                if (!(w >= 0.0)) throw std::invalid_argument("plan: output weights must be nonnegative");
                ws += w;
            }
            if (std::abs(ws - 1.0) > 1e-9)
                throw std::invalid_argument("plan: output weights must sum to 1");
            break;
        }
        default: break;
    }
}

StepsizePlan StepsizePlan::custom(PlanKind kind, std::vector<double> gamma,
                                  std::vector<double> theta, std::vector<double> p,
                                  std::vector<double> Gamma, std::vector<double> output_weights,
                                  PlanMeta meta, std::vector<double> L) {
    StepsizePlan plan;
    plan.kind_ = kind;
    plan.gamma_ = std::move(gamma);
    plan.theta_ = std::move(theta);
    plan.p_ = std::move(p);
    plan.Gamma_ = std::move(Gamma);
    plan.output_weights_ = std::move(output_weights);
    plan.meta_ = std::move(meta);
    plan.validate(L);
    return plan;
}

StepsizePlan plan_nonsmooth_a(const std::vector<double>& D, const std::vector<double>& M, int N) {
    if (N < 1) throw std::invalid_argument("plan: N must be at least 1");
    if (D.size() != M.size() || D.empty()) throw std::invalid_argument("plan: D/M length mismatch");
    double sum_sqrt_D = 0.0, sum_M2 = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i) {
        if (!(D[i] > 0.0) || !std::isfinite(D[i]))
            throw std::invalid_argument("plan: finite positive D_i required (use nonsmooth-b otherwise)");
        if (!(M[i] > 0.0)) throw std::invalid_argument("plan: M_i must be positive");
        sum_sqrt_D += std::sqrt(D[i]);
        sum_M2 += M[i] * M[i];
    }
    std::vector<double> p(D.size());
    for (std::size_t i = 0; i < D.size(); ++i) p[i] = std::sqrt(D[i]) / sum_sqrt_D;
    double gamma = std::sqrt(2.0) * sum_sqrt_D / std::sqrt(static_cast<double>(N) * sum_M2);
    std::vector<double> g(static_cast<std::size_t>(N), gamma);
    return StepsizePlan::custom(PlanKind::nonsmooth_a, g, g, std::move(p));
}

StepsizePlan plan_nonsmooth_b(double D_tilde, const std::vector<double>& M, int b, int N) {
    if (N < 1) throw std::invalid_argument("plan: N must be at least 1");
    if (!(D_tilde > 0.0)) throw std::invalid_argument("plan: D_tilde must be positive");
    if (static_cast<int>(M.size()) != b) throw std::invalid_argument("plan: M length mismatch");
    double sum_M2 = 0.0;
    for (double m : M) {
        if (!(m > 0.0)) throw std::invalid_argument("plan: M_i must be positive");
        sum_M2 += m * m;
    }
    double gamma = std::sqrt(2.0 * b) * D_tilde / std::sqrt(static_cast<double>(N) * sum_M2);
    std::vector<double> g(static_cast<std::size_t>(N), gamma);
    std::vector<double> p(static_cast<std::size_t>(b), 1.0 / b);
    PlanMeta meta;
    meta.D_tilde = D_tilde;
    return StepsizePlan::custom(PlanKind::nonsmooth_b, g, g, std::move(p), {}, {}, meta);
}

StepsizePlan plan_strongly(int b, double Q, double mu, int N) {
    if (N < 1) throw std::invalid_argument("plan: N must be at least 1");
    if (!(mu > 0.0)) throw std::invalid_argument("plan: mu must be positive");
    if (!(Q >= 1.0)) throw std::invalid_argument("plan: Q must be at least 1");
    std::vector<double> gamma(static_cast<std::size_t>(N));
    std::vector<double> Gamma(static_cast<std::size_t>(N));
    std::vector<double> theta(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) {
        std::size_t j = static_cast<std::size_t>(k - 1);
        gamma[j] = 2.0 * b * Q / (mu * (k + 1));
        Gamma[j] = k == 1 ? 1.0 : Gamma[j - 1] * (1.0 - gamma[j] * mu / (b * Q));
        theta[j] = gamma[j] / Gamma[j];
    }
    std::vector<double> p(static_cast<std::size_t>(b), 1.0 / b);
    PlanMeta meta;
    meta.Q = Q;
    meta.mu = mu;
    return StepsizePlan::custom(PlanKind::strongly_convex, std::move(gamma), std::move(theta),
                                std::move(p), std::move(Gamma), {}, meta);
}

StepsizePlan plan_composite(int b, double L_bar, double sigma, double D_tilde, int N) {
    if (N < 1) throw std::invalid_argument("plan: N must be at least 1");
    if (!(L_bar > 0.0)) throw std::invalid_argument("plan: L_bar must be positive");
    if (!(sigma >= 0.0)) throw std::invalid_argument("plan: sigma must be nonnegative");
    if (!(D_tilde > 0.0)) throw std::invalid_argument("plan: D_tilde must be positive");
    double gamma = 0.5 / L_bar;
    if (sigma > 0.0)
        gamma = std::min(gamma, D_tilde / sigma * std::sqrt(static_cast<double>(b) / N));
    std::vector<double> g(static_cast<std::size_t>(N), gamma);
    std::vector<double> theta(static_cast<std::size_t>(N + 1), 0.0);
    for (int k = 1; k <= N; ++k)
        theta[static_cast<std::size_t>(k)] = b * g[static_cast<std::size_t>(k - 1)] -
                                             (b - 1) * gamma;  // constant gamma: theta = gamma
    std::vector<double> p(static_cast<std::size_t>(b), 1.0 / b);
    PlanMeta meta;
    meta.L_bar = L_bar;
    meta.sigma = sigma;
    meta.D_tilde = D_tilde;
    return StepsizePlan::custom(PlanKind::composite, std::move(g), std::move(theta), std::move(p),
                                {}, {}, meta);
}

StepsizePlan plan_composite_strongly(int b, double Q, double mu, double L_bar, int N) {
    if (N < 1) throw std::invalid_argument("plan: N must be at least 1");
    if (!(mu > 0.0) || !(L_bar > 0.0)) throw std::invalid_argument("plan: mu, L_bar must be positive");
    if (!(Q >= 1.0)) throw std::invalid_argument("plan: Q must be at least 1");
    long k0 = static_cast<long>(std::floor(4.0 * b * Q * L_bar / mu));
    if (k0 < 1) throw std::invalid_argument("plan: 4bQL/mu must be at least 1");

    auto gam = [&](int k) { return 2.0 * b * Q / (mu * (k + k0)); };
    std::vector<double> gamma(static_cast<std::size_t>(N));
    std::vector<double> Gamma(static_cast<std::size_t>(N + 1));
    for (int k = 1; k <= N + 1; ++k) {
        if (k <= N) gamma[static_cast<std::size_t>(k - 1)] = gam(k);
        std::size_t j = static_cast<std::size_t>(k - 1);
        Gamma[j] = k == 1 ? 1.0 : Gamma[j - 1] * (1.0 - gam(k) * mu / (b * Q));
    }
    std::vector<double> theta(static_cast<std::size_t>(N + 1), 0.0);
    for (int k = 1; k <= N; ++k)
        theta[static_cast<std::size_t>(k)] =
            b * gam(k) / Gamma[static_cast<std::size_t>(k - 1)] -
            (b - 1) * gam(k + 1) / Gamma[static_cast<std::size_t>(k)];
    Gamma.resize(static_cast<std::size_t>(N));
    std::vector<double> p(static_cast<std::size_t>(b), 1.0 / b);
    PlanMeta meta;
    meta.Q = Q;
    meta.mu = mu;
    meta.L_bar = L_bar;
    meta.k0 = k0;
    return StepsizePlan::custom(PlanKind::composite_strongly, std::move(gamma), std::move(theta),
                                std::move(p), std::move(Gamma), {}, meta);
}

StepsizePlan plan_nonconvex(const std::vector<double>& L, const std::vector<double>& p, int N) {
    if (N < 1) throw std::invalid_argument("plan: N must be at least 1");
    if (L.size() != p.size() || L.empty()) throw std::invalid_argument("plan: L/p length mismatch");
    double L_bar = 0.0;
    for (double l : L) {
        if (!(l > 0.0)) throw std::invalid_argument("plan: L_i must be positive");
        L_bar = std::max(L_bar, l);
    }
    double gamma = 1.0 / L_bar;
    std::vector<double> g(static_cast<std::size_t>(N), gamma);
    std::vector<double> w(static_cast<std::size_t>(N));
    double total = 0.0;
    for (int k = 1; k <= N; ++k) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < L.size(); ++i)
            m = std::min(m, p[i] * (1.0 - 0.5 * L[i] * gamma));
        w[static_cast<std::size_t>(k - 1)] = gamma * m;
        total += gamma * m;
    }
    for (auto& v : w) v /= total;
    PlanMeta meta;
    meta.L_bar = L_bar;
    return StepsizePlan::custom(PlanKind::nonconvex, std::move(g), {}, std::vector<double>(p), {},
                                std::move(w), meta, std::vector<double>(L));
}

}  // namespace sbmd
