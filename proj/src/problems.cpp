#include "sbmd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbmd {

namespace {

double sgn0(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

std::vector<double> replicate(double v, int n) {
    return std::vector<double>(static_cast<std::size_t>(n), v);
}

}  // namespace

std::string to_string(ProblemClass tag) {
    switch (tag) {
        case ProblemClass::nonsmooth_convex: return "nonsmooth-convex";
        case ProblemClass::nonsmooth_strongly_convex: return "nonsmooth-strongly-convex";
        case ProblemClass::smooth_composite_convex: return "smooth-composite-convex";
        case ProblemClass::smooth_composite_strongly_convex: return "smooth-composite-strongly-convex";
        case ProblemClass::smooth_composite_nonconvex: return "smooth-composite-nonconvex";
    }
    return "?";
}

std::optional<double> StochasticProblem::phi_star() const {
    return f_star_;  // stored reference value is already phi* for composite classes
}

double StochasticProblem::sum_M_sq() const {
    if (!M_) throw std::logic_error("M_i not declared for this problem");
    double s = 0.0;
    for (double m : *M_) s += m * m;
    return s;
}

double StochasticProblem::L_bar() const {
    if (!L_) throw std::logic_error("L_i not declared for this problem");
    double m = 0.0;
    for (double l : *L_) m = std::max(m, l);
    return m;
}

double StochasticProblem::sigma_total() const {
    if (!sigma_) return 0.0;
    double s = 0.0;
    for (double v : *sigma_) s += v * v;
    return std::sqrt(s);
}

void StochasticProblem::stoch_subgrad(const BlockVector& x, const Sample& s,
                                      std::span<double> out) const {
    for (int i = 0; i < structure().block_count(); ++i) {
        auto sub = out.subspan(static_cast<std::size_t>(structure().block_offset(i)),
                               static_cast<std::size_t>(structure().block_size(i)));
        stoch_subgrad_block(x, s, i, sub);
    }
}

void StochasticProblem::grad_exact(const BlockVector& x, std::span<double> out) const {
    for (int i = 0; i < structure().block_count(); ++i) {
        auto sub = out.subspan(static_cast<std::size_t>(structure().block_offset(i)),
                               static_cast<std::size_t>(structure().block_size(i)));
        grad_block_exact(x, i, sub);
    }
}

double StochasticProblem::composite_objective(const BlockVector& x) const {
    double v = objective(x);
    if (regularizer_) v += regularizer_->eval(x);
    return v;
}

int StochasticProblem::check_block(int i) const {
    if (i < 0 || i >= structure().block_count())
        throw std::invalid_argument("block index out of range");
    return i;
}

// ---------------------------------------------------------------------------
// P1 / P2

namespace {

class P1Problem : public StochasticProblem {
public:
    P1Problem(int n, int b, double delta, double box_lower, double box_upper,
              std::vector<double> center, double mu) {
        if (!(delta >= 0.0)) throw std::invalid_argument("p1: delta must be nonnegative");
        if (static_cast<int>(center.size()) != n)
            throw std::invalid_argument("p1: center length mismatch");
        auto structure = BlockStructure::even(n, b);
        setup_ = std::make_shared<const ProxSetup>(ProxSetup::boxes(structure, box_lower, box_upper));
        delta_ = delta;
        center_ = std::move(center);
        mu_ = mu;
        for (double c : center_)
            if (c < box_lower || c > box_upper)
                throw std::invalid_argument("p1: noise center must lie in the box");

        name_ = mu > 0.0 ? "p2" : "p1";
        tag_ = mu > 0.0 ? ProblemClass::nonsmooth_strongly_convex : ProblemClass::nonsmooth_convex;
        f_star_ = n * delta / 2.0;
        x_star_ = BlockVector(structure, center_);

        std::vector<double> M;
        for (int i = 0; i < b; ++i) {
            double m = std::sqrt(static_cast<double>(structure->block_size(i)));
            if (mu > 0.0) {
                // sup_x |x^(i) - c^(i)| over the box, for a sure bound on the
                // strongly convex term's contribution
                double rho2 = 0.0;
                for (int j = 0; j < structure->block_size(i); ++j) {
                    double c = center_[static_cast<std::size_t>(structure->block_offset(i) + j)];
                    double r = std::max(box_upper - c, c - box_lower);
                    rho2 += r * r;
                }
                m += mu * std::sqrt(rho2);
            }
            M.push_back(m);
        }
        M_ = std::move(M);
    }

    Sample sample(RngStream& rng) const override {
        Sample s;
        s.data.resize(center_.size());
        for (std::size_t j = 0; j < center_.size(); ++j)
            s.data[j] = center_[j] + delta_ * rng.uniform(-1.0, 1.0);
        return s;
    }

    void stoch_subgrad_block(const BlockVector& x, const Sample& s, int i,
                             std::span<double> out) const override {
        check_block(i);
        auto xb = x.block(i);
        int off = structure().block_offset(i);
        for (std::size_t j = 0; j < xb.size(); ++j) {
            double g = sgn0(xb[j] - s.data[static_cast<std::size_t>(off) + j]);
            if (mu_ > 0.0) g += mu_ * (xb[j] - center_[static_cast<std::size_t>(off) + j]);
            out[j] = g;
        }
    }

    void grad_block_exact(const BlockVector& x, int i, std::span<double> out) const override {
        check_block(i);
        auto xb = x.block(i);
        int off = structure().block_offset(i);
        for (std::size_t j = 0; j < xb.size(); ++j) {
            double t = xb[j] - center_[static_cast<std::size_t>(off) + j];
            double g = delta_ > 0.0 ? std::clamp(t / delta_, -1.0, 1.0) : sgn0(t);
            if (mu_ > 0.0) g += mu_ * t;
            out[j] = g;
        }
    }

    double objective(const BlockVector& x) const override {
        double f = 0.0;
        for (std::size_t j = 0; j < center_.size(); ++j) {
            double t = x.values()[j] - center_[j];
            if (delta_ > 0.0) {
                f += std::abs(t) <= delta_ ? (t * t + delta_ * delta_) / (2.0 * delta_) : std::abs(t);
            } else {
                f += std::abs(t);
            }
            if (mu_ > 0.0) f += 0.5 * mu_ * t * t;
        }
        return f;
    }

private:
    double delta_ = 0.0;
    std::vector<double> center_;
};

}  // namespace

std::shared_ptr<StochasticProblem> make_p1_nonsmooth(int n, int b, double delta, double box_lower,
                                                     double box_upper, double center) {
    return make_p1_nonsmooth(n, b, delta, box_lower, box_upper, replicate(center, n));
}

std::shared_ptr<StochasticProblem> make_p1_nonsmooth(int n, int b, double delta, double box_lower,
                                                     double box_upper, std::vector<double> center) {
    return std::make_shared<P1Problem>(n, b, delta, box_lower, box_upper, std::move(center), 0.0);
}

std::shared_ptr<StochasticProblem> make_p2_strongly(int n, int b, double delta, double mu,
                                                    double box_lower, double box_upper,
                                                    double center) {
    if (!(mu >= 0.0)) throw std::invalid_argument("p2: mu must be nonnegative");
    return std::make_shared<P1Problem>(n, b, delta, box_lower, box_upper, replicate(center, n), mu);
}

// ---------------------------------------------------------------------------
// Smooth composite problems share the bounded uniform gradient-noise model:
// per block, coordinates are uniform on [-w_i, w_i] with w_i chosen so that
// E|noise_i|^2 = sigma_i^2 exactly. Bounded support keeps the light-tail
// condition satisfied.

namespace {

class SmoothCompositeBase : public StochasticProblem {
public:
    Sample sample(RngStream& rng) const override {
        Sample s;
        s.data.resize(static_cast<std::size_t>(structure().dim()));
        std::size_t j = 0;
        for (int i = 0; i < structure().block_count(); ++i) {
            double w = noise_halfwidth_[static_cast<std::size_t>(i)];
            for (int k = 0; k < structure().block_size(i); ++k, ++j)
                s.data[j] = w * rng.uniform(-1.0, 1.0);
        }
        return s;
    }

    void stoch_subgrad_block(const BlockVector& x, const Sample& s, int i,
                             std::span<double> out) const override {
        grad_block_exact(x, i, out);
        int off = structure().block_offset(i);
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += s.data[static_cast<std::size_t>(off) + j];
    }

protected:
    void init_noise(double sigma_block) {
        if (!(sigma_block >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
        int b = structure().block_count();
        sigma_ = replicate(sigma_block, b);
        noise_halfwidth_.clear();
        for (int i = 0; i < b; ++i)
            noise_halfwidth_.push_back(sigma_block *
                                       std::sqrt(3.0 / structure().block_size(i)));
    }

    std::vector<double> noise_halfwidth_;
};

class P3Problem : public SmoothCompositeBase {
public:
    P3Problem(std::vector<double> a_diag, std::vector<double> b_vec, int b, double lambda,
              double sigma_block, bool declare_strongly) {
        int n = static_cast<int>(a_diag.size());
        if (b_vec.size() != a_diag.size())
            throw std::invalid_argument("p3: a and b length mismatch");
        for (double a : a_diag)
            if (!(a > 0.0)) throw std::invalid_argument("p3: diagonal entries must be positive");
        if (!(lambda >= 0.0)) throw std::invalid_argument("p3: lambda must be nonnegative");

        auto structure = BlockStructure::even(n, b);
        setup_ = std::make_shared<const ProxSetup>(ProxSetup::free_space(structure));
        a_ = std::move(a_diag);
        b_ = std::move(b_vec);
        name_ = "p3";
        regularizer_ = SeparableRegularizer::l1_uniform(b, lambda);
        init_noise(sigma_block);

        std::vector<double> L;
        for (int i = 0; i < b; ++i) {
            double m = 0.0;
            for (int j = 0; j < structure->block_size(i); ++j)
                m = std::max(m, a_[static_cast<std::size_t>(structure->block_offset(i) + j)]);
            L.push_back(m);
        }
        L_ = std::move(L);

        if (declare_strongly) {
            mu_ = *std::min_element(a_.begin(), a_.end());
            tag_ = ProblemClass::smooth_composite_strongly_convex;
        } else {
            tag_ = ProblemClass::smooth_composite_convex;
        }

        if (lambda == 0.0) {
            double f = 0.0;
            std::vector<double> xs(a_.size());
            for (std::size_t j = 0; j < a_.size(); ++j) {
                xs[j] = b_[j] / a_[j];
                f -= 0.5 * b_[j] * b_[j] / a_[j];
            }
            f_star_ = f;
            x_star_ = BlockVector(structure, std::move(xs));
        } else {
            BlockVector xs = reference_prox_gradient(*this);
            f_star_ = composite_objective(xs);
            x_star_ = std::move(xs);
        }
    }

    void grad_block_exact(const BlockVector& x, int i, std::span<double> out) const override {
        check_block(i);
        auto xb = x.block(i);
        int off = structure().block_offset(i);
        for (std::size_t j = 0; j < xb.size(); ++j) {
            std::size_t k = static_cast<std::size_t>(off) + j;
            out[j] = a_[k] * xb[j] - b_[k];
        }
    }

    double objective(const BlockVector& x) const override {
        double f = 0.0;
        for (std::size_t j = 0; j < a_.size(); ++j) {
            double v = x.values()[j];
            f += 0.5 * a_[j] * v * v - b_[j] * v;
        }
        return f;
    }

private:
    std::vector<double> a_, b_;
};

class P4Problem : public SmoothCompositeBase {
public:
    P4Problem(int n, int b, double lambda, double sigma_block, double box_lower, double box_upper) {
        if (!(lambda >= 0.0)) throw std::invalid_argument("p4: lambda must be nonnegative");
        if (box_lower > 0.0 || box_upper < 0.0)
            throw std::invalid_argument("p4: box must contain the origin");
        auto structure = BlockStructure::even(n, b);
        setup_ = std::make_shared<const ProxSetup>(ProxSetup::boxes(structure, box_lower, box_upper));
        name_ = "p4";
        tag_ = ProblemClass::smooth_composite_nonconvex;
        regularizer_ = SeparableRegularizer::l1_uniform(b, lambda);
        init_noise(sigma_block);
        L_ = replicate(2.0, b);  // |f''| = 2|1-3t^2|/(1+t^2)^3 <= 2
        f_star_ = 0.0;
        x_star_ = BlockVector::zeros(structure);
    }

    void grad_block_exact(const BlockVector& x, int i, std::span<double> out) const override {
        check_block(i);
        auto xb = x.block(i);
        for (std::size_t j = 0; j < xb.size(); ++j) {
            double t = xb[j];
            double d = 1.0 + t * t;
            out[j] = 2.0 * t / (d * d);
        }
    }

    double objective(const BlockVector& x) const override {
        double f = 0.0;
        for (double t : x.values()) f += t * t / (1.0 + t * t);
        return f;
    }
};

}  // namespace

std::shared_ptr<StochasticProblem> make_p3_composite(std::vector<double> a_diag,
                                                     std::vector<double> b_vec, int b,
                                                     double lambda, double sigma_block,
                                                     bool declare_strongly) {
    return std::make_shared<P3Problem>(std::move(a_diag), std::move(b_vec), b, lambda, sigma_block,
                                       declare_strongly);
}

std::shared_ptr<StochasticProblem> make_p4_nonconvex(int n, int b, double lambda,
                                                     double sigma_block, double box_lower,
                                                     double box_upper) {
    return std::make_shared<P4Problem>(n, b, lambda, sigma_block, box_lower, box_upper);
}

BlockVector reference_prox_gradient(const StochasticProblem& problem, double tol, long max_iters) {
    if (!problem.L()) throw std::invalid_argument("reference solver needs smooth problem");
    const double step = 1.0 / problem.L_bar();
    BlockVector x = problem.setup().omega_min_point();
    std::vector<double> g(static_cast<std::size_t>(x.dim()));
    double prev = problem.composite_objective(x);
    for (long it = 0; it < max_iters; ++it) {
        problem.grad_exact(x, g);
        for (int i = 0; i < problem.structure().block_count(); ++i) {
            auto gi = std::span<const double>(g).subspan(
                static_cast<std::size_t>(problem.structure().block_offset(i)),
                static_cast<std::size_t>(problem.structure().block_size(i)));
            RegularizerTerm chi = problem.regularizer() ? problem.regularizer()->term(i)
                                                        : RegularizerTerm::zero();
            auto u = composite_prox_step(problem.setup(), i, x.block(i), gi, step, chi);
            std::copy(u.begin(), u.end(), x.block(i).begin());
        }
        double cur = problem.composite_objective(x);
        if (prev - cur < tol && it > 2) break;
        prev = cur;
    }
    return x;
}

}  // namespace sbmd
