#include "sbmd/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace sbmd {

namespace {

using nlohmann::json;

struct TrialTask {
    std::size_t group;
    int trial;
    long N;
};

double output_pg_norm_sq(const StochasticProblem& problem, const RunRecord& rec, double gamma) {
    std::vector<double> g(static_cast<std::size_t>(rec.output.dim()));
    problem.grad_exact(rec.output, g);
    BlockVector pg = projected_gradient(problem.setup(), problem.regularizer(), rec.output, g, gamma);
    double s = 0.0;
    for (double v : pg.values()) s += v * v;
    return s;
}

RunRecord run_one_inner(const ExperimentConfig& config, const StochasticProblem& problem,
                        const StepsizePlan& plan, const BlockVector& x1, long N, int trial) {
    const std::uint64_t seed = config.run.seed + static_cast<std::uint64_t>(trial);
    TrialRng rng(config.run.seed, static_cast<std::uint64_t>(trial));
    const int n = static_cast<int>(N);
    switch (config.run.algorithm) {
        case Algorithm::sbmd:
            return sbmd_run(problem, problem.setup(), plan, x1, n, rng, seed);
        case Algorithm::sbmd_composite:
            return sbmd_composite_run(problem, problem.setup(), plan, x1, n, rng, seed);
        case Algorithm::sbmd_nonconvex:
            return sbmd_nonconvex_run(problem, problem.setup(), plan, x1, n, config.plan.minibatch,
                                      rng, seed, config.run.check_lemma);
        case Algorithm::md_sa:
            return md_sa_run(problem, problem.setup(), plan.gammas(), plan.thetas(), x1, n, rng,
                             seed);
    }
    throw std::logic_error("unreachable algorithm");
}

RunRecord run_one(const ExperimentConfig& config, const StochasticProblem& problem,
                  const StepsizePlan& plan, const BlockVector& x1, long N, int trial) {
    try {
        return run_one_inner(config, problem, plan, x1, N, trial);
    } catch (const std::exception& e) {
        throw std::runtime_error("trial " + std::to_string(trial) + " (seed " +
                                 std::to_string(config.run.seed + static_cast<std::uint64_t>(trial)) +
                                 ", N=" + std::to_string(N) + ") failed: " + e.what());
    }
}

std::optional<BoundSpec> make_bound_spec(const ExperimentConfig& config,
                                         const StochasticProblem& problem,
                                         const StepsizePlan& plan, const BlockVector& x1) {
    BoundSpec spec;
    spec.b = problem.structure().block_count();
    if (problem.M()) spec.M = *problem.M();
    if (auto q = problem.setup().Q()) spec.Q = *q;
    if (problem.mu() > 0.0) spec.mu = problem.mu();
    if (problem.L()) spec.L_bar = config.plan.lbar_scale * problem.L_bar();
    spec.sigma = problem.sigma_total();
    spec.D_tilde = plan.meta().D_tilde;
    spec.k0 = plan.meta().k0;
    for (int i = 0; i < spec.b; ++i) {
        auto d = problem.setup().D(i);
        if (!d) break;
        spec.D.push_back(*d);
    }

    auto xs = problem.reference_minimizer();
    if (xs) {
        double v1 = 0.0;
        for (int i = 0; i < spec.b; ++i)
            v1 += bregman(problem.setup(), i, x1.block(i), xs->block(i));
        spec.V1 = v1;
        spec.dphi = problem.composite_objective(x1) - *problem.phi_star();
    }

    switch (config.plan.kind) {
        case PlanKind::nonsmooth_a: spec.kind = BoundKind::nonsmooth_a; break;
        case PlanKind::nonsmooth_b:
            if (spec.D.size() != static_cast<std::size_t>(spec.b)) return std::nullopt;
            spec.kind = BoundKind::nonsmooth_b_optimalD;
            break;
        case PlanKind::strongly_convex: spec.kind = BoundKind::strongly; break;
        case PlanKind::composite: spec.kind = BoundKind::composite; break;
        case PlanKind::composite_strongly: spec.kind = BoundKind::composite_strongly; break;
        case PlanKind::nonconvex:
            if (problem.sigma_total() > 0.0) {
                spec.kind = BoundKind::nonconvex_stoch;
                spec.T = config.plan.minibatch;
            } else {
                spec.kind = BoundKind::nonconvex_det;
            }
            break;
    }
    return spec;
}

std::pair<double, std::optional<double>> mean_se(const std::vector<double>& vals) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    if (vals.size() < 2) return {mean, std::nullopt};
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(vals.size()))};
}

struct ExperimentData {
    std::vector<std::vector<RunRecord>> records;  // [group][trial]
    std::vector<StepsizePlan> plans;
    BlockVector x1;
    std::shared_ptr<StochasticProblem> problem;
};

ExperimentData run_all(const ExperimentConfig& config, int jobs) {
    ExperimentData data{.records = {}, .plans = {}, .x1 = BlockVector::zeros(BlockStructure::even(1, 1)),
                        .problem = nullptr};
    data.problem = instantiate_problem(config.problem);
    data.x1 = initial_point(config, *data.problem);
    for (long N : config.run.n_grid)
        data.plans.push_back(build_plan(config, *data.problem, data.x1, N));

    std::vector<TrialTask> tasks;
    for (std::size_t g = 0; g < config.run.n_grid.size(); ++g)
        for (int t = 0; t < config.run.trials; ++t)
            tasks.push_back({g, t, config.run.n_grid[g]});

    std::vector<std::vector<std::optional<RunRecord>>> slots(
        config.run.n_grid.size(),
        std::vector<std::optional<RunRecord>>(static_cast<std::size_t>(config.run.trials)));

    auto worker_body = [&](std::atomic<std::size_t>& next, std::exception_ptr& error,
                           std::mutex& error_mu) {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const TrialTask& task = tasks[idx];
            try {
                slots[task.group][static_cast<std::size_t>(task.trial)] =
                    run_one(config, *data.problem, data.plans[task.group], data.x1, task.N,
                            task.trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (threads == 1) {
        worker_body(next, error, error_mu);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] { worker_body(next, error, error_mu); });
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    for (auto& group : slots) {
        std::vector<RunRecord> rs;
        for (auto& slot : group) rs.push_back(std::move(*slot));
        data.records.push_back(std::move(rs));
    }
    return data;
}

std::string render_csv(const ExperimentConfig& config, const ExperimentData& data) {
    std::ostringstream out;
    out << "algorithm,problem,trial,seed,N,k,gap,pg_norm_sq,samples_used,wall_ms\n";
    const std::string algo = to_string(config.run.algorithm);
    // Rows ordered by (trial, N, k).
    for (int t = 0; t < config.run.trials; ++t) {
        for (std::size_t g = 0; g < data.records.size(); ++g) {
            const RunRecord& rec = data.records[g][static_cast<std::size_t>(t)];
            for (const Checkpoint& c : rec.checkpoints) {
                out << algo << ',' << config.problem.name << ',' << t << ',' << rec.seed << ','
                    << rec.N << ',' << c.k << ',' << format_double(c.gap) << ',';
                if (c.pg_norm_sq) out << format_double(*c.pg_norm_sq);
                out << ',' << c.samples_used << ',' << format_double(rec.wall_ms) << '\n';
            }
        }
    }
    return out.str();
}

json stats_to_json(const TrialStats& stats) {
    json groups = json::array();
    for (const auto& g : stats.groups) {
        json cps = json::array();
        for (const auto& c : g.checkpoints) {
            json j{{"k", c.k}, {"mean", c.mean}, {"q25", c.q25}, {"q50", c.q50}, {"q75", c.q75}};
            j["se"] = c.se ? json(*c.se) : json(nullptr);
            cps.push_back(j);
        }
        groups.push_back({{"N", g.N}, {"trials", g.trials}, {"checkpoints", cps}});
    }
    return groups;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

bool csv_equal_excluding_wall(const std::string& a, const std::string& b) {
    auto strip = [](const std::string& text) {
        std::string out;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            auto pos = line.rfind(',');
            out += line.substr(0, pos == std::string::npos ? line.size() : pos);
            out += '\n';
        }
        return out;
    };
    return strip(a) == strip(b);
}

std::string experiment_csv(const ExperimentConfig& config, int jobs) {
    ExperimentData data = run_all(config, jobs);
    return render_csv(config, data);
}

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs,
                                const std::string& out_dir_override) {
    ExperimentData data = run_all(config, jobs);
    const StochasticProblem& problem = *data.problem;
    const bool nonconvex = config.run.algorithm == Algorithm::sbmd_nonconvex;

    std::vector<RunRecord> flat;
    for (const auto& group : data.records)
        for (const auto& rec : group) flat.push_back(rec);

    ExperimentResult result;
    result.stats = aggregate(flat, nonconvex ? Metric::pg_norm_sq : Metric::gap, {},
                             /*allow_single=*/config.run.trials < 2);

    json summary;
    summary["algorithm"] = to_string(config.run.algorithm);
    summary["problem"] = config.problem.name;
    summary["problem_class"] = to_string(problem.tag());
    summary["plan"] = to_string(config.plan.kind);
    summary["trials"] = config.run.trials;
    summary["base_seed"] = config.run.seed;
    summary["checkpoints"] = stats_to_json(result.stats);

    json jgroups = json::array();
    for (std::size_t g = 0; g < data.records.size(); ++g) {
        const long N = config.run.n_grid[g];
        const StepsizePlan& plan = data.plans[g];
        GroupSummary gs;
        gs.N = N;

        // Dominance metric: final-gap for the convex algorithms, |PG|^2 of
        // the randomized output for the nonconvex one.
        std::vector<double> finals;
        for (const auto& rec : data.records[g]) {
            if (nonconvex) {
                finals.push_back(output_pg_norm_sq(problem, rec, plan.gamma(1)));
            } else {
                finals.push_back(rec.checkpoints.back().gap);
            }
        }
        auto [mean, se] = mean_se(finals);
        gs.final_mean = mean;
        gs.final_se = se;

        if (auto spec = make_bound_spec(config, problem, plan, data.x1)) {
            gs.bound = bound_value(*spec, N);
            double slack = se ? 2.0 * *se : 0.0;
            gs.dominance_pass = mean <= *gs.bound + slack;
            if (!*gs.dominance_pass) result.all_pass = false;
        }

        json jtails = json::array();
        if (!config.output.tail_lambdas.empty() && config.plan.kind == PlanKind::nonsmooth_b &&
            plan.meta().D_tilde && problem.setup().sum_D()) {
            std::vector<double> thresholds;
            for (double lam : config.output.tail_lambdas)
                thresholds.push_back(tail_threshold_nonsmooth(
                    problem.structure().block_count(), *plan.meta().D_tilde, *problem.M(),
                    *problem.setup().sum_D(), N, lam));
            TrialStats tail_stats =
                aggregate(data.records[g], Metric::gap, thresholds, config.run.trials < 2);
            const auto& exc = tail_stats.groups.front().exceedance;
            for (std::size_t li = 0; li < config.output.tail_lambdas.size(); ++li) {
                TailCheck tc;
                tc.lambda = config.output.tail_lambdas[li];
                tc.threshold = thresholds[li];
                tc.frequency = exc[li].frequency;
                tc.binomial_se = exc[li].binomial_se;
                tc.bound = tail_bound(tc.lambda);
                tc.pass = tc.frequency <= tc.bound + 2.0 * tc.binomial_se;
                if (!tc.pass) result.all_pass = false;
                gs.tails.push_back(tc);
                jtails.push_back({{"lambda", tc.lambda},
                                  {"threshold", tc.threshold},
                                  {"frequency", tc.frequency},
                                  {"binomial_se", tc.binomial_se},
                                  {"tail_bound", tc.bound},
                                  {"pass", tc.pass}});
            }
        }

        json jg{{"N", N},
                {"final_mean", gs.final_mean},
                {"final_se", gs.final_se ? json(*gs.final_se) : json(nullptr)},
                {"bound", gs.bound ? json(*gs.bound) : json(nullptr)},
                {"dominance_pass", gs.dominance_pass ? json(*gs.dominance_pass) : json(nullptr)},
                {"metric", nonconvex ? "output_pg_norm_sq" : "final_gap"}};
        if (!result.groups.empty() && gs.final_mean > 0.0)
            jg["mean_ratio_vs_prev"] = result.groups.back().final_mean / gs.final_mean;
        if (!jtails.empty()) jg["tails"] = jtails;
        jgroups.push_back(jg);
        result.groups.push_back(std::move(gs));
    }
    summary["groups"] = jgroups;

    // Rate fit over the final means of the dominance metric.
    if (config.run.n_grid.size() >= 3 &&
        static_cast<double>(config.run.n_grid.back()) / config.run.n_grid.front() >= 10.0) {
        TrialStats fit_input;
        for (const auto& gs : result.groups) {
            GroupStats g;
            g.N = gs.N;
            g.trials = config.run.trials;
            CheckpointStats cs;
            cs.k = gs.N;
            cs.mean = gs.final_mean;
            cs.se = gs.final_se;
            g.checkpoints.push_back(cs);
            fit_input.groups.push_back(std::move(g));
        }
        result.fit = rate_fit(fit_input);
        json jf{{"slope", result.fit->slope},
                {"slope_se", result.fit->slope_se},
                {"clipped", result.fit->clipped}};
        if (config.output.slope_min && config.output.slope_max) {
            result.slope_pass = result.fit->slope >= *config.output.slope_min &&
                                result.fit->slope <= *config.output.slope_max;
            if (!*result.slope_pass) result.all_pass = false;
            jf["window"] = {*config.output.slope_min, *config.output.slope_max};
            jf["pass"] = *result.slope_pass;
        }
        summary["rate_fit"] = jf;
    }
    summary["all_pass"] = result.all_pass;

    namespace fs = std::filesystem;
    const fs::path dir = out_dir_override.empty() ? fs::path(config.output.dir)
                                                  : fs::path(out_dir_override);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory: " + dir.string());

    const fs::path csv_path = dir / config.output.csv;
    const fs::path json_path = dir / config.output.json;
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot write " + csv_path.string());
        out << render_csv(config, data);
        if (!out) throw std::ios_base::failure("write failed: " + csv_path.string());
    }
    {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot write " + json_path.string());
        out << summary.dump(2) << '\n';
        if (!out) throw std::ios_base::failure("write failed: " + json_path.string());
    }
    result.csv_path = csv_path.string();
    result.json_path = json_path.string();
    return result;
}

}  // namespace sbmd
