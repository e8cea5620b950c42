#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbmd/cli.hpp"
#include "sbmd/config.hpp"
#include "sbmd/experiment.hpp"

using namespace sbmd;

namespace {

const char* kMinimalConfig = R"(
[problem]
name = p1
n = 4
b = 2
delta = 0.5
center = 0.25

[plan]
kind = nonsmooth-b

[run]
algorithm = sbmd
n_grid = 100
trials = 2
seed = 1
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"sbmd"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("parse_config: minimal document and rejection rules") {
    ExperimentConfig c = parse_config(kMinimalConfig);
    CHECK(c.problem.name == "p1");
    CHECK(c.run.n_grid == std::vector<long>{100});
    CHECK(c.run.trials == 2);

    // plan 'strongly' with a problem that has no mu
    std::string bad = kMinimalConfig;
    bad.replace(bad.find("nonsmooth-b"), 11, "strongly");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("mu absent"), ConfigError);

    std::string dup = std::string(kMinimalConfig) + "\n[output]\ndir = a\ndir = b\n";
    CHECK_THROWS_WITH_AS(parse_config(dup), doctest::Contains("duplicate key 'dir'"), ConfigError);

    std::string unknown = std::string(kMinimalConfig) + "\n[plan]\nfoo = 1\n";
    try {
        parse_config(unknown);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unknown key 'foo'") != std::string::npos);
        CHECK(e.line() > 0);
    }

    std::string bad_grid = kMinimalConfig;
    bad_grid.replace(bad_grid.find("n_grid = 100"), 12, "n_grid = 100,100");
    CHECK_THROWS_AS(parse_config(bad_grid), ConfigError);

    // keys that exist in the schema but do not apply to the chosen problem
    std::string inapplicable = std::string(kMinimalConfig) + "\n[problem]\nlambda = 0.5\n";
    CHECK_THROWS_WITH_AS(parse_config(inapplicable),
                         doctest::Contains("does not apply to problem 'p1'"), ConfigError);

    std::string mismatched = kMinimalConfig;
    mismatched.replace(mismatched.find("algorithm = sbmd"), 16, "algorithm = sbmd-composite");
    CHECK_THROWS_AS(parse_config(mismatched), ConfigError);
}

TEST_CASE("experiment csv: layout, determinism, concurrency independence") {
    ExperimentConfig c = parse_config(kMinimalConfig);
    c.run.n_grid = {20, 50};
    std::string csv1 = experiment_csv(c);
    std::string csv2 = experiment_csv(c);
    CHECK(csv_equal_excluding_wall(csv1, csv2));
    std::string csv4 = experiment_csv(c, 4);
    CHECK(csv_equal_excluding_wall(csv1, csv4));

    std::istringstream in(csv1);
    std::string line;
    std::getline(in, line);
    CHECK(line == "algorithm,problem,trial,seed,N,k,gap,pg_norm_sq,samples_used,wall_ms");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    // checkpoints: N=20 -> {1,2,4,8,16,20}, N=50 -> {1,2,4,8,16,32,50}
    CHECK(rows == 2 * (6 + 7));

    c.run.seed = 2;
    CHECK(!csv_equal_excluding_wall(csv1, experiment_csv(c)));
}

TEST_CASE("run_experiment writes summary with dominance flags") {
    ExperimentConfig c = parse_config(kMinimalConfig);
    c.run.n_grid = {20, 50};
    c.run.trials = 4;
    c.output.dir = "test_out_summary";
    ExperimentResult res = run_experiment(c);
    CHECK(std::filesystem::exists(res.csv_path));
    CHECK(std::filesystem::exists(res.json_path));
    REQUIRE(res.groups.size() == 2);
    CHECK(res.groups[0].bound.has_value());
    CHECK(res.groups[0].final_se.has_value());
    std::string json = slurp(res.json_path);
    CHECK(json.find("dominance_pass") != std::string::npos);
    std::filesystem::remove_all("test_out_summary");
}

TEST_CASE("run_experiment with a single trial reports null standard errors") {
    ExperimentConfig c = parse_config(kMinimalConfig);
    c.run.trials = 1;
    c.output.dir = "test_out_single";
    ExperimentResult res = run_experiment(c);
    CHECK(!res.groups[0].final_se.has_value());
    std::string json = slurp(res.json_path);
    CHECK(json.find("\"final_se\": null") != std::string::npos);
    CHECK(json.find("\"se\": null") != std::string::npos);
    std::filesystem::remove_all("test_out_single");
}

TEST_CASE("md-sa algorithm runs through the harness") {
    std::string text = kMinimalConfig;
    text.replace(text.find("algorithm = sbmd"), 16, "algorithm = md-sa");
    ExperimentConfig c = parse_config(text);
    c.run.n_grid = {30};
    std::string csv1 = experiment_csv(c);
    std::string csv2 = experiment_csv(c);
    CHECK(csv_equal_excluding_wall(csv1, csv2));
    CHECK(csv1.find("md-sa,p1,") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sbmd_cli_test";
    fs::create_directories(dir);
    fs::path good = dir / "good.ini";
    {
        std::ofstream out(good);
        out << kMinimalConfig << "\n[run\n";  // malformed section header
    }
    CHECK(run_cli({"run", good.string().c_str()}) == 1);

    fs::path ok = dir / "ok.ini";
    {
        std::ofstream out(ok);
        out << kMinimalConfig;
    }
    fs::path outdir = dir / "out";
    CHECK(run_cli({"run", ok.string().c_str(), "--out", outdir.string().c_str()}) == 0);
    CHECK(fs::exists(outdir / "results.csv"));

    // SBMD_SEED override shows up in the seed column
    setenv("SBMD_SEED", "777", 1);
    fs::path outdir2 = dir / "out2";
    CHECK(run_cli({"run", ok.string().c_str(), "--out", outdir2.string().c_str()}) == 0);
    unsetenv("SBMD_SEED");
    std::string csv = slurp((outdir2 / "results.csv").string());
    CHECK(csv.find(",777,") != std::string::npos);

    // output path collides with an existing file -> I/O error
    fs::path blocker = dir / "blocked";
    {
        std::ofstream out(blocker);
        out << "x";
    }
    CHECK(run_cli({"run", ok.string().c_str(), "--out", (blocker / "sub").string().c_str()}) == 3);

    CHECK(run_cli({"bound", "strongly", "--n", "7", "--b", "2", "--Q", "1", "--mu", "1", "--M",
                   "1,1"}) == 0);
    CHECK(run_cli({"bound", "strongly", "--n", "7", "--b", "2"}) == 1);  // missing constants
    CHECK(run_cli({"bound", "no-such-kind", "--n", "7"}) == 1);
    CHECK(run_cli({"list-problems"}) == 0);
    CHECK(run_cli({"nope"}) == 1);

    fs::remove_all(dir);
}
