#ifndef SBMD_ANALYSIS_HPP
#define SBMD_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "sbmd/solvers.hpp"

namespace sbmd {

enum class BoundKind {
    nonsmooth_a,
    nonsmooth_b_optimalD,
    strongly,
    composite,
    composite_strongly,
    nonconvex_det,
    nonconvex_stoch,
    tail_nonsmooth,
    tail_strongly,
};

std::optional<BoundKind> bound_kind_from_string(const std::string& s);
std::string to_string(BoundKind kind);

// Constants consumed by the rate and tail bounds. Only the fields required
// by the requested kind need to be set.
struct BoundSpec {
    BoundKind kind = BoundKind::nonsmooth_a;
    int b = 0;
    std::vector<double> D;        // per-block D_i
    std::vector<double> M;        // per-block M_i
    std::optional<double> D_tilde;
    std::optional<double> Q;
    std::optional<double> mu;
    std::optional<double> L_bar;
    std::optional<double> sigma;  // aggregate sigma = sqrt(sum sigma_i^2)
    std::optional<long> k0;
    std::optional<double> dphi;   // phi(x_1) - phi*
    std::optional<double> V1;     // sum_i V_i(x_1, x*)
    std::optional<double> lambda; // tail parameter
    std::optional<long> T;        // mini-batch size
};

// Exact evaluation of the theoretical gap (or stationarity) bound at horizon
// N. For the tail kinds this is the deviation threshold at the given lambda.
double bound_value(const BoundSpec& spec, long N);

// exp(-lambda^2/3) + exp(-lambda): the two-term tail probability.
double tail_bound(double lambda);

// Deviation thresholds of the two large-deviation corollaries.
double tail_threshold_nonsmooth(int b, double D_tilde, const std::vector<double>& M,
                                double sum_D, long N, double lambda);
double tail_threshold_strongly(int b, double M_bar, double Q, double mu, double sum_D, long N,
                               double lambda);

// Per-checkpoint sample statistics across trials of one N group.
struct CheckpointStats {
    long k = 0;
    double mean = 0.0;
    std::optional<double> se;  // sample std / sqrt(trials); absent for a single trial
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

struct ExceedanceStat {
    double threshold = 0.0;
    double frequency = 0.0;    // empirical P{metric >= threshold} at the final checkpoint
    double binomial_se = 0.0;  // sqrt(p(1-p)/trials)
};

struct GroupStats {
    long N = 0;
    int trials = 0;
    std::vector<CheckpointStats> checkpoints;
    std::vector<ExceedanceStat> exceedance;
    const CheckpointStats& final_checkpoint() const { return checkpoints.back(); }
};

struct TrialStats {
    std::vector<GroupStats> groups;  // one per N, ascending
};

enum class Metric { gap, pg_norm_sq };

// Groups records by N, requires aligned checkpoints within each group, and
// computes means, standard errors, quartiles and exceedance frequencies.
// Fewer than two records per group is a contract violation unless
// allow_single is set (single-trial runs report null SEs).
TrialStats aggregate(const std::vector<RunRecord>& records, Metric metric,
                     const std::vector<double>& exceedance_thresholds = {},
                     bool allow_single = false);

struct RateFit {
    double slope = 0.0;
    double slope_se = 0.0;
    bool clipped = false;  // some gap hit the 1e-16 floor before the log fit
};

// Least-squares slope of log(final mean gap) against log N across groups.
RateFit rate_fit(const TrialStats& stats);

}  // namespace sbmd

#endif
