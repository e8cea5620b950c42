#ifndef SBMD_PLANS_HPP
#define SBMD_PLANS_HPP

#include <optional>
#include <string>
#include <vector>

namespace sbmd {

enum class PlanKind {
    nonsmooth_a,
    nonsmooth_b,
    strongly_convex,
    composite,
    composite_strongly,
    nonconvex,
};

std::string to_string(PlanKind kind);

// Stepsizes, averaging weights, block probabilities and (where applicable)
// the Gamma recursion. gamma[k-1] holds gamma_k for k = 1..N. For the two
// composite kinds theta has N+1 entries with theta[0] = theta_1 = 0 and the
// output averages x_2..x_{N+1}; for the others theta has N entries attached
// to x_1..x_N. The nonconvex kind carries normalized output weights for the
// randomized output index instead of averaging weights.
struct PlanMeta {
    std::optional<double> D_tilde, Q, mu, L_bar, sigma;
    std::optional<long> k0;
};

class StepsizePlan {
public:
    static StepsizePlan custom(PlanKind kind, std::vector<double> gamma, std::vector<double> theta,
                               std::vector<double> p, std::vector<double> Gamma = {},
                               std::vector<double> output_weights = {}, PlanMeta meta = {},
                               std::vector<double> L = {});

    PlanKind kind() const { return kind_; }
    int horizon() const { return static_cast<int>(gamma_.size()); }
    int block_count() const { return static_cast<int>(p_.size()); }

    double gamma(int k) const { return gamma_.at(static_cast<std::size_t>(k - 1)); }
    double theta(int k) const { return theta_.at(static_cast<std::size_t>(k - 1)); }
    double Gamma(int k) const { return Gamma_.at(static_cast<std::size_t>(k - 1)); }

    const std::vector<double>& gammas() const { return gamma_; }
    const std::vector<double>& thetas() const { return theta_; }
    const std::vector<double>& probabilities() const { return p_; }
    const std::vector<double>& Gammas() const { return Gamma_; }
    const std::vector<double>& output_weights() const { return output_weights_; }
    const PlanMeta& meta() const { return meta_; }

private:
    PlanKind kind_ = PlanKind::nonsmooth_a;
    std::vector<double> gamma_, theta_, p_, Gamma_, output_weights_;
    PlanMeta meta_;
    void validate(const std::vector<double>& L) const;
};

// Stepsize plans for the supported problem classes. D, M, L are per-block.
StepsizePlan plan_nonsmooth_a(const std::vector<double>& D, const std::vector<double>& M, int N);
StepsizePlan plan_nonsmooth_b(double D_tilde, const std::vector<double>& M, int b, int N);
StepsizePlan plan_strongly(int b, double Q, double mu, int N);
StepsizePlan plan_composite(int b, double L_bar, double sigma, double D_tilde, int N);
StepsizePlan plan_composite_strongly(int b, double Q, double mu, double L_bar, int N);
StepsizePlan plan_nonconvex(const std::vector<double>& L, const std::vector<double>& p, int N);

}  // namespace sbmd

#endif
