#ifndef SBMD_CONFIG_HPP
#define SBMD_CONFIG_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbmd/plans.hpp"
#include "sbmd/problems.hpp"

namespace sbmd {

// Configuration error with the offending line number when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

enum class Algorithm { sbmd, sbmd_composite, sbmd_nonconvex, md_sa };
std::string to_string(Algorithm a);

struct ProblemSpec {
    std::string name;  // p1, p2, p3, p4
    int n = 0;
    int b = 0;
    double delta = 0.0;
    double mu = 0.0;
    double box_lower = -1.0;
    double box_upper = 1.0;
    double center = 0.0;
    std::vector<double> a_diag;  // p3; scalar configs are replicated to length n
    std::vector<double> b_vec;
    double lambda = 0.0;
    double sigma = 0.0;
    bool strongly = false;
};

struct PlanSpec {
    PlanKind kind = PlanKind::nonsmooth_b;
    std::optional<double> d_tilde;  // absent = auto
    double lbar_scale = 1.0;
    int minibatch = 1;
};

struct RunSpec {
    Algorithm algorithm = Algorithm::sbmd;
    std::vector<long> n_grid;
    int trials = 1;
    std::uint64_t seed = 1;
    std::optional<double> x1;  // absent = per-block omega minimizer
    bool check_lemma = true;
};

struct OutputSpec {
    std::string dir = "out";
    std::string csv = "results.csv";
    std::string json = "summary.json";
    std::optional<double> slope_min, slope_max;
    std::vector<double> tail_lambdas;
};

struct ExperimentConfig {
    ProblemSpec problem;
    PlanSpec plan;
    RunSpec run;
    OutputSpec output;
};

// Parses and validates the key-value/section experiment document. Unknown
// keys, duplicate keys, malformed values and incompatible plan/problem
// pairings are rejected with line-level messages.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

std::shared_ptr<StochasticProblem> instantiate_problem(const ProblemSpec& spec);

// Plan for one horizon N, using the problem's declared constants; dtilde
// resolves per the recommended choices when absent.
StepsizePlan build_plan(const ExperimentConfig& config, const StochasticProblem& problem,
                        const BlockVector& x1, long N);

BlockVector initial_point(const ExperimentConfig& config, const StochasticProblem& problem);

}  // namespace sbmd

#endif
