#include "sbmd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sbmd/geometry.hpp"

namespace sbmd {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Document {
    // (section, key) -> entry
    std::map<std::pair<std::string, std::string>, Entry> entries;

    const Entry* find(const std::string& section, const std::string& key) const {
        auto it = entries.find({section, key});
        return it == entries.end() ? nullptr : &it->second;
    }
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::map<std::string, std::set<std::string>> kSchema = {
    {"problem",
     {"name", "n", "b", "delta", "mu", "box_lower", "box_upper", "center", "a_diag", "b_vec",
      "lambda", "sigma", "strongly"}},
    {"plan", {"kind", "dtilde", "lbar_scale", "minibatch"}},
    {"run", {"algorithm", "n_grid", "trials", "seed", "x1", "check_lemma"}},
    {"output", {"dir", "csv", "json", "slope_min", "slope_max", "tail_lambdas"}},
};

Document lex(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(lineno, "malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!kSchema.count(section)) throw ConfigError(lineno, "unknown section '" + section + "'");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
        if (section.empty()) throw ConfigError(lineno, "key outside of a section");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (!kSchema.at(section).count(key))
            throw ConfigError(lineno, "unknown key '" + key + "' in [" + section + "]");
        auto [it, inserted] = doc.entries.insert({{section, key}, Entry{value, lineno, false}});
        if (!inserted) throw ConfigError(lineno, "duplicate key '" + key + "'");
    }
    return doc;
}

double parse_double(const Entry& e) {
    try {
        std::size_t pos = 0;
        double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(e.line, "expected a number, got '" + e.value + "'");
    }
}

long parse_long(const Entry& e) {
    try {
        std::size_t pos = 0;
        long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(e.line, "expected an integer, got '" + e.value + "'");
    }
}

std::uint64_t parse_u64(const Entry& e) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(e.line, "expected an unsigned integer, got '" + e.value + "'");
    }
}

bool parse_bool(const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError(e.line, "expected a boolean, got '" + e.value + "'");
}

std::vector<double> parse_double_list(const Entry& e) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ConfigError(e.line, "empty list element");
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError(e.line, "expected a number, got '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(e.line, "empty list");
    return out;
}

std::vector<long> parse_long_list(const Entry& e) {
    std::vector<long> out;
    for (double v : parse_double_list(e)) {
        if (v != std::floor(v)) throw ConfigError(e.line, "expected integers");
        out.push_back(static_cast<long>(v));
    }
    return out;
}

const Entry& require(const Document& doc, const std::string& section, const std::string& key) {
    const Entry* e = doc.find(section, key);
    if (!e) throw ConfigError(0, "missing required key '" + key + "' in [" + section + "]");
    return *e;
}

ProblemClass tag_of(const ProblemSpec& p) {
    if (p.name == "p1") return ProblemClass::nonsmooth_convex;
    if (p.name == "p2") return ProblemClass::nonsmooth_strongly_convex;
    if (p.name == "p3")
        return p.strongly ? ProblemClass::smooth_composite_strongly_convex
                          : ProblemClass::smooth_composite_convex;
    return ProblemClass::smooth_composite_nonconvex;
}

// Keys that make sense for each zoo problem; anything else is rejected even
// though the section schema knows the key.
const std::map<std::string, std::set<std::string>> kProblemKeys = {
    {"p1", {"name", "n", "b", "delta", "box_lower", "box_upper", "center"}},
    {"p2", {"name", "n", "b", "delta", "mu", "box_lower", "box_upper", "center"}},
    {"p3", {"name", "n", "b", "a_diag", "b_vec", "lambda", "sigma", "strongly"}},
    {"p4", {"name", "n", "b", "lambda", "sigma", "box_lower", "box_upper"}},
};

void check_problem_keys(const Document& doc, const std::string& problem) {
    const auto& allowed = kProblemKeys.at(problem);
    for (const auto& [loc, entry] : doc.entries) {
        if (loc.first != "problem") continue;
        if (!allowed.count(loc.second))
            throw ConfigError(entry.line,
                              "key '" + loc.second + "' does not apply to problem '" + problem + "'");
    }
}

void check_compatibility(const ExperimentConfig& c) {
    const ProblemClass tag = tag_of(c.problem);
    auto fail = [&](const std::string& msg) { throw ConfigError(0, msg); };
    if (c.problem.name == "p2" && !(c.problem.mu > 0.0)) fail("p2 requires mu > 0");

    switch (c.plan.kind) {
        case PlanKind::nonsmooth_a:
        case PlanKind::nonsmooth_b:
            if (tag != ProblemClass::nonsmooth_convex && tag != ProblemClass::nonsmooth_strongly_convex)
                fail("plan '" + to_string(c.plan.kind) + "' requires a nonsmooth problem");
            break;
        case PlanKind::strongly_convex:
            if (tag != ProblemClass::nonsmooth_strongly_convex)
                fail("plan 'strongly' requires a strongly convex problem (mu absent)");
            break;
        case PlanKind::composite:
            if (tag != ProblemClass::smooth_composite_convex &&
                tag != ProblemClass::smooth_composite_strongly_convex)
                fail("plan 'composite' requires a smooth composite convex problem");
            break;
        case PlanKind::composite_strongly:
            if (tag != ProblemClass::smooth_composite_strongly_convex)
                fail("plan 'composite-strongly' requires a strongly convex composite problem");
            break;
        case PlanKind::nonconvex:
            if (tag != ProblemClass::smooth_composite_nonconvex)
                fail("plan 'nonconvex' requires the nonconvex problem class");
            break;
    }

    auto plan_in = [&](std::initializer_list<PlanKind> ks) {
        return std::find(ks.begin(), ks.end(), c.plan.kind) != ks.end();
    };
    switch (c.run.algorithm) {
        case Algorithm::sbmd:
        case Algorithm::md_sa:
            if (!plan_in({PlanKind::nonsmooth_a, PlanKind::nonsmooth_b, PlanKind::strongly_convex}))
                fail("algorithm '" + to_string(c.run.algorithm) + "' needs a nonsmooth or strongly plan");
            break;
        case Algorithm::sbmd_composite:
            if (!plan_in({PlanKind::composite, PlanKind::composite_strongly}))
                fail("algorithm 'sbmd-composite' needs a composite plan");
            break;
        case Algorithm::sbmd_nonconvex:
            if (!plan_in({PlanKind::nonconvex})) fail("algorithm 'sbmd-nonconvex' needs the nonconvex plan");
            break;
    }

    if (c.run.n_grid.empty()) fail("n_grid must be non-empty");
    for (std::size_t i = 0; i + 1 < c.run.n_grid.size(); ++i)
        if (c.run.n_grid[i] >= c.run.n_grid[i + 1]) fail("n_grid must be strictly increasing");
    if (c.run.trials < 1) fail("trials must be at least 1");
    if (c.plan.minibatch < 1) fail("minibatch must be at least 1");
    if (!(c.plan.lbar_scale > 0.0)) fail("lbar_scale must be positive");
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::sbmd: return "sbmd";
        case Algorithm::sbmd_composite: return "sbmd-composite";
        case Algorithm::sbmd_nonconvex: return "sbmd-nonconvex";
        case Algorithm::md_sa: return "md-sa";
    }
    return "?";
}

ExperimentConfig parse_config(const std::string& text) {
    Document doc = lex(text);
    ExperimentConfig c;

    // [problem]
    const Entry& name = require(doc, "problem", "name");
    if (name.value != "p1" && name.value != "p2" && name.value != "p3" && name.value != "p4")
        throw ConfigError(name.line, "unknown problem '" + name.value + "'");
    c.problem.name = name.value;
    check_problem_keys(doc, c.problem.name);
    c.problem.b = static_cast<int>(parse_long(require(doc, "problem", "b")));
    if (const Entry* e = doc.find("problem", "n")) c.problem.n = static_cast<int>(parse_long(*e));
    if (const Entry* e = doc.find("problem", "delta")) c.problem.delta = parse_double(*e);
    if (const Entry* e = doc.find("problem", "mu")) c.problem.mu = parse_double(*e);
    if (const Entry* e = doc.find("problem", "box_lower")) c.problem.box_lower = parse_double(*e);
    if (const Entry* e = doc.find("problem", "box_upper")) c.problem.box_upper = parse_double(*e);
    if (const Entry* e = doc.find("problem", "center")) c.problem.center = parse_double(*e);
    if (const Entry* e = doc.find("problem", "lambda")) c.problem.lambda = parse_double(*e);
    if (const Entry* e = doc.find("problem", "sigma")) c.problem.sigma = parse_double(*e);
    if (const Entry* e = doc.find("problem", "strongly")) c.problem.strongly = parse_bool(*e);
    if (const Entry* e = doc.find("problem", "a_diag")) c.problem.a_diag = parse_double_list(*e);
    if (const Entry* e = doc.find("problem", "b_vec")) c.problem.b_vec = parse_double_list(*e);
    if (c.problem.name != "p3" && c.problem.n < 1)
        throw ConfigError(0, "missing required key 'n' in [problem]");
    if (c.problem.name == "p3") {
        if (c.problem.a_diag.empty())
            throw ConfigError(0, "p3 requires 'a_diag' (list, or scalar with 'n')");
        if (c.problem.a_diag.size() == 1 && c.problem.n > 1)
            c.problem.a_diag.assign(static_cast<std::size_t>(c.problem.n), c.problem.a_diag[0]);
        c.problem.n = static_cast<int>(c.problem.a_diag.size());
        if (c.problem.b_vec.empty()) c.problem.b_vec.assign(c.problem.a_diag.size(), 0.0);
        if (c.problem.b_vec.size() == 1)
            c.problem.b_vec.assign(c.problem.a_diag.size(), c.problem.b_vec[0]);
        if (c.problem.b_vec.size() != c.problem.a_diag.size())
            throw ConfigError(0, "p3: b_vec length must match a_diag");
    }

    // [plan]
    const Entry& kind = require(doc, "plan", "kind");
    if (kind.value == "nonsmooth-a") c.plan.kind = PlanKind::nonsmooth_a;
    else if (kind.value == "nonsmooth-b") c.plan.kind = PlanKind::nonsmooth_b;
    else if (kind.value == "strongly") c.plan.kind = PlanKind::strongly_convex;
    else if (kind.value == "composite") c.plan.kind = PlanKind::composite;
    else if (kind.value == "composite-strongly") c.plan.kind = PlanKind::composite_strongly;
    else if (kind.value == "nonconvex") c.plan.kind = PlanKind::nonconvex;
    else throw ConfigError(kind.line, "unknown plan kind '" + kind.value + "'");
    if (const Entry* e = doc.find("plan", "dtilde")) {
        if (e->value != "auto") c.plan.d_tilde = parse_double(*e);
    }
    if (const Entry* e = doc.find("plan", "lbar_scale")) c.plan.lbar_scale = parse_double(*e);
    if (const Entry* e = doc.find("plan", "minibatch")) c.plan.minibatch = static_cast<int>(parse_long(*e));

    // [run]
    const Entry& algo = require(doc, "run", "algorithm");
    if (algo.value == "sbmd") c.run.algorithm = Algorithm::sbmd;
    else if (algo.value == "sbmd-composite") c.run.algorithm = Algorithm::sbmd_composite;
    else if (algo.value == "sbmd-nonconvex") c.run.algorithm = Algorithm::sbmd_nonconvex;
    else if (algo.value == "md-sa") c.run.algorithm = Algorithm::md_sa;
    else throw ConfigError(algo.line, "unknown algorithm '" + algo.value + "'");
    c.run.n_grid = parse_long_list(require(doc, "run", "n_grid"));
    c.run.trials = static_cast<int>(parse_long(require(doc, "run", "trials")));
    c.run.seed = parse_u64(require(doc, "run", "seed"));
    if (const Entry* e = doc.find("run", "x1")) {
        if (e->value != "omega-min") c.run.x1 = parse_double(*e);
    }
    if (const Entry* e = doc.find("run", "check_lemma")) c.run.check_lemma = parse_bool(*e);

    // [output]
    if (const Entry* e = doc.find("output", "dir")) c.output.dir = e->value;
    if (const Entry* e = doc.find("output", "csv")) c.output.csv = e->value;
    if (const Entry* e = doc.find("output", "json")) c.output.json = e->value;
    if (const Entry* e = doc.find("output", "slope_min")) c.output.slope_min = parse_double(*e);
    if (const Entry* e = doc.find("output", "slope_max")) c.output.slope_max = parse_double(*e);
    if (const Entry* e = doc.find("output", "tail_lambdas"))
        c.output.tail_lambdas = parse_double_list(*e);

    check_compatibility(c);
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::shared_ptr<StochasticProblem> instantiate_problem(const ProblemSpec& spec) {
    if (spec.name == "p1")
        return make_p1_nonsmooth(spec.n, spec.b, spec.delta, spec.box_lower, spec.box_upper,
                                 spec.center);
    if (spec.name == "p2")
        return make_p2_strongly(spec.n, spec.b, spec.delta, spec.mu, spec.box_lower, spec.box_upper,
                                spec.center);
    if (spec.name == "p3")
        return make_p3_composite(spec.a_diag, spec.b_vec, spec.b, spec.lambda, spec.sigma,
                                 spec.strongly);
    return make_p4_nonconvex(spec.n, spec.b, spec.lambda, spec.sigma, spec.box_lower,
                             spec.box_upper);
}

BlockVector initial_point(const ExperimentConfig& config, const StochasticProblem& problem) {
    if (!config.run.x1) return problem.setup().omega_min_point();
    BlockVector x = BlockVector::constant(problem.structure_ptr(), *config.run.x1);
    if (!problem.setup().contains(x)) throw ConfigError(0, "x1 lies outside the feasible set");
    return x;
}

StepsizePlan build_plan(const ExperimentConfig& config, const StochasticProblem& problem,
                        const BlockVector& x1, long N) {
    const int b = problem.structure().block_count();
    const int n = static_cast<int>(N);

    auto sum_Vi_to_star = [&]() {
        auto xs = problem.reference_minimizer();
        if (!xs) throw ConfigError(0, "problem lacks a reference minimizer for dtilde = auto");
        double s = 0.0;
        for (int i = 0; i < b; ++i) s += bregman(problem.setup(), i, x1.block(i), xs->block(i));
        return s;
    };

    switch (config.plan.kind) {
        case PlanKind::nonsmooth_a: {
            auto sd = problem.setup().sum_D();
            if (!sd) throw ConfigError(0, "plan 'nonsmooth-a' needs bounded blocks (use nonsmooth-b)");
            std::vector<double> D;
            for (int i = 0; i < b; ++i) D.push_back(*problem.setup().D(i));
            return plan_nonsmooth_a(D, *problem.M(), n);
        }
        case PlanKind::nonsmooth_b: {
            double dt;
            if (config.plan.d_tilde) {
                dt = *config.plan.d_tilde;
            } else if (auto sd = problem.setup().sum_D()) {
                dt = std::sqrt(*sd);  // recommended choice when the D_i are known
            } else {
                dt = std::sqrt(sum_Vi_to_star());
            }
            return plan_nonsmooth_b(dt, *problem.M(), b, n);
        }
        case PlanKind::strongly_convex: {
            auto Q = problem.setup().Q();
            if (!Q) throw ConfigError(0, "plan 'strongly' needs a quadratic-growth constant");
            return plan_strongly(b, *Q, problem.mu(), n);
        }
        case PlanKind::composite: {
            double dt = config.plan.d_tilde ? *config.plan.d_tilde : std::sqrt(sum_Vi_to_star());
            return plan_composite(b, config.plan.lbar_scale * problem.L_bar(),
                                  problem.sigma_total(), dt, n);
        }
        case PlanKind::composite_strongly: {
            auto Q = problem.setup().Q();
            if (!Q) throw ConfigError(0, "plan 'composite-strongly' needs a quadratic-growth constant");
            return plan_composite_strongly(b, *Q, problem.mu(),
                                           config.plan.lbar_scale * problem.L_bar(), n);
        }
        case PlanKind::nonconvex: {
            std::vector<double> p(static_cast<std::size_t>(b), 1.0 / b);
            std::vector<double> L = *problem.L();
            for (auto& l : L) l *= config.plan.lbar_scale;
            return plan_nonconvex(L, p, n);
        }
    }
    throw ConfigError(0, "unreachable plan kind");
}

}  // namespace sbmd
