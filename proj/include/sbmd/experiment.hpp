#ifndef SBMD_EXPERIMENT_HPP
#define SBMD_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "sbmd/analysis.hpp"
#include "sbmd/config.hpp"
#include "sbmd/solvers.hpp"

namespace sbmd {

struct TailCheck {
    double lambda = 0.0;
    double threshold = 0.0;
    double frequency = 0.0;
    double binomial_se = 0.0;
    double bound = 0.0;  // exp(-lambda^2/3) + exp(-lambda)
    bool pass = false;
};

struct GroupSummary {
    long N = 0;
    double final_mean = 0.0;
    std::optional<double> final_se;
    std::optional<double> bound;          // theoretical bound at this N
    std::optional<bool> dominance_pass;   // mean <= bound + 2 SE
    std::vector<TailCheck> tails;
};

struct ExperimentResult {
    std::string csv_path;
    std::string json_path;
    TrialStats stats;
    std::vector<GroupSummary> groups;
    std::optional<RateFit> fit;
    std::optional<bool> slope_pass;
    bool all_pass = true;
};

// Runs trials x N grid (trial t uses seed = base_seed + t), writes the
// per-checkpoint CSV and the JSON summary, and returns the summary. jobs > 1
// executes trials concurrently; row order and bytes do not depend on it.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1,
                                const std::string& out_dir_override = "");

// In-memory variant used by tests: returns the CSV text instead of writing.
std::string experiment_csv(const ExperimentConfig& config, int jobs = 1);

// Byte comparison that ignores the wall-time column.
bool csv_equal_excluding_wall(const std::string& a, const std::string& b);

// Shortest representation that round-trips the double exactly.
std::string format_double(double v);

}  // namespace sbmd

#endif
