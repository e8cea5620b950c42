#ifndef SBMD_PROBLEMS_HPP
#define SBMD_PROBLEMS_HPP

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbmd/blocks.hpp"
#include "sbmd/geometry.hpp"
#include "sbmd/rng.hpp"

namespace sbmd {

enum class ProblemClass {
    nonsmooth_convex,
    nonsmooth_strongly_convex,
    smooth_composite_convex,
    smooth_composite_strongly_convex,
    smooth_composite_nonconvex,
};

std::string to_string(ProblemClass tag);

// One realization of xi, sufficient to evaluate F(., xi) and its (sub)gradient.
struct Sample {
    std::vector<double> data;
};

// Stochastic first-order oracle with analytically known constants. The exact
// objective and exact gradients are for evaluation and oracles only; solvers
// see nothing but sample() and stoch_subgrad_block().
class StochasticProblem {
public:
    virtual ~StochasticProblem() = default;

    const std::string& name() const { return name_; }
    ProblemClass tag() const { return tag_; }
    std::shared_ptr<const BlockStructure> structure_ptr() const { return setup_->structure_ptr(); }
    const BlockStructure& structure() const { return setup_->structure(); }
    const ProxSetup& setup() const { return *setup_; }
    const SeparableRegularizer* regularizer() const { return regularizer_ ? &*regularizer_ : nullptr; }

    // Declared constants. Empty optionals mean "not available for this class".
    const std::optional<std::vector<double>>& M() const { return M_; }
    const std::optional<std::vector<double>>& L() const { return L_; }
    const std::optional<std::vector<double>>& sigma() const { return sigma_; }
    double mu() const { return mu_; }
    std::optional<double> f_star() const { return f_star_; }
    std::optional<double> phi_star() const;
    std::optional<BlockVector> reference_minimizer() const { return x_star_; }

    double sum_M_sq() const;
    double L_bar() const;
    double sigma_total() const;  // sqrt(sum sigma_i^2)

    virtual Sample sample(RngStream& rng) const = 0;
    virtual void stoch_subgrad_block(const BlockVector& x, const Sample& s, int i,
                                     std::span<double> out) const = 0;
    // Analytic g_i(x) = E[G_i(x, xi)].
    virtual void grad_block_exact(const BlockVector& x, int i, std::span<double> out) const = 0;
    // Exact f(x); never touches the sample stream.
    virtual double objective(const BlockVector& x) const = 0;

    void stoch_subgrad(const BlockVector& x, const Sample& s, std::span<double> out) const;
    void grad_exact(const BlockVector& x, std::span<double> out) const;
    double composite_objective(const BlockVector& x) const;

    int check_block(int i) const;

protected:
    std::string name_;
    ProblemClass tag_ = ProblemClass::nonsmooth_convex;
    std::shared_ptr<const ProxSetup> setup_;
    std::optional<SeparableRegularizer> regularizer_;
    std::optional<std::vector<double>> M_, L_, sigma_;
    double mu_ = 0.0;
    std::optional<double> f_star_;
    std::optional<BlockVector> x_star_;
};

// f(x) = E|x - xi|_1 with xi uniform on c + [-delta, delta]^n over a box.
// M_i = sqrt(n_i), f* = n delta / 2 at x* = c.
std::shared_ptr<StochasticProblem> make_p1_nonsmooth(int n, int b, double delta, double box_lower,
                                                     double box_upper, double center);
std::shared_ptr<StochasticProblem> make_p1_nonsmooth(int n, int b, double delta, double box_lower,
                                                     double box_upper, std::vector<double> center);

// P1 plus (mu/2)|x - c|_2^2; same minimizer, mu declared, Q = 1.
std::shared_ptr<StochasticProblem> make_p2_strongly(int n, int b, double delta, double mu,
                                                    double box_lower, double box_upper,
                                                    double center);

// f = x'Ax/2 - b'x with diagonal A, additive bounded gradient noise with
// per-block deviation sigma_i, chi = lambda |x|_1 on free space.
// L_i = max diagonal entry in block i; phi* from a deterministic full-vector
// proximal-gradient reference run when lambda > 0.
std::shared_ptr<StochasticProblem> make_p3_composite(std::vector<double> a_diag,
                                                     std::vector<double> b_vec, int b,
                                                     double lambda, double sigma_block,
                                                     bool declare_strongly = false);

// f(x) = sum x_j^2/(1+x_j^2) (smooth, nonconvex, L_i = 2), chi = lambda |x|_1
// over a box containing the origin; phi* = 0 at x = 0.
std::shared_ptr<StochasticProblem> make_p4_nonconvex(int n, int b, double lambda,
                                                     double sigma_block, double box_lower,
                                                     double box_upper);

// Deterministic full-vector proximal gradient, run to 1e-10 objective
// stagnation. Reference oracle for phi*; not used by any solver under test.
BlockVector reference_prox_gradient(const StochasticProblem& problem, double tol = 1e-10,
                                    long max_iters = 2000000);

}  // namespace sbmd

#endif
