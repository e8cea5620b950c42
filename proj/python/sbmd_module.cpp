#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbmd/analysis.hpp"
#include "sbmd/config.hpp"
#include "sbmd/experiment.hpp"
#include "sbmd/geometry.hpp"
#include "sbmd/plans.hpp"
#include "sbmd/problems.hpp"
#include "sbmd/solvers.hpp"
#include "sbmd/verify.hpp"

namespace py = pybind11;
using namespace sbmd;

namespace {

BlockVector to_block_vector(const StochasticProblem& problem, const std::vector<double>& values) {
    return BlockVector(problem.structure_ptr(), values);
}

py::dict record_to_dict(const RunRecord& rec) {
    py::dict d;
    d["seed"] = rec.seed;
    d["N"] = rec.N;
    d["samples_used"] = rec.samples_used;
    d["prox_calls"] = rec.prox_calls;
    d["wall_ms"] = rec.wall_ms;
    d["output"] = rec.output.values();
    py::list cps;
    for (const auto& c : rec.checkpoints) {
        py::dict cp;
        cp["k"] = c.k;
        cp["gap"] = c.gap;
        cp["pg_norm_sq"] = c.pg_norm_sq ? py::object(py::float_(*c.pg_norm_sq)) : py::none();
        cp["samples_used"] = c.samples_used;
        cps.append(cp);
    }
    d["checkpoints"] = cps;
    d["lemma_slack_max"] =
        rec.lemma_slack_max ? py::object(py::float_(*rec.lemma_slack_max)) : py::none();
    return d;
}

BoundSpec spec_from_kwargs(const std::string& kind, int b, std::vector<double> D,
                           std::vector<double> M, py::object D_tilde, py::object Q, py::object mu,
                           py::object L_bar, py::object sigma, py::object k0, py::object dphi,
                           py::object V1, py::object lambda, py::object T) {
    auto bk = bound_kind_from_string(kind);
    if (!bk) throw std::invalid_argument("unknown bound kind '" + kind + "'");
    BoundSpec spec;
    spec.kind = *bk;
    spec.b = b;
    spec.D = std::move(D);
    spec.M = std::move(M);
    auto opt = [](py::object o) -> std::optional<double> {
        return o.is_none() ? std::nullopt : std::optional<double>(o.cast<double>());
    };
    spec.D_tilde = opt(D_tilde);
    spec.Q = opt(Q);
    spec.mu = opt(mu);
    spec.L_bar = opt(L_bar);
    spec.sigma = opt(sigma);
    spec.dphi = opt(dphi);
    spec.V1 = opt(V1);
    spec.lambda = opt(lambda);
    if (!k0.is_none()) spec.k0 = k0.cast<long>();
    if (!T.is_none()) spec.T = T.cast<long>();
    return spec;
}

}  // namespace

PYBIND11_MODULE(_sbmd, m) {
    m.doc() = "stochastic block mirror descent toolkit";

    py::class_<BlockGeometry>(m, "BlockGeometry")
        .def_static("box", &BlockGeometry::box, py::arg("lower"), py::arg("upper"))
        .def_static("ball", &BlockGeometry::ball, py::arg("center"), py::arg("radius"))
        .def_static("simplex", &BlockGeometry::simplex, py::arg("dim"))
        .def_property_readonly("dim", &BlockGeometry::dim)
        .def("contains",
             [](const BlockGeometry& g, const std::vector<double>& x) {
                 return g.contains(std::span<const double>(x));
             });

    py::class_<RegularizerTerm>(m, "RegularizerTerm")
        .def_static("zero", &RegularizerTerm::zero)
        .def_static("l1", &RegularizerTerm::l1, py::arg("weight"));

    m.def("omega_range",
          [](const BlockGeometry& g) -> py::object {
              auto d = omega_range(g);
              return d ? py::object(py::float_(*d)) : py::none();
          });
    m.def("bregman",
          [](const BlockGeometry& g, const std::vector<double>& z, const std::vector<double>& x) {
              return bregman(g, z, x);
          });
    m.def(
        "prox_step",
        [](const BlockGeometry& g, const std::vector<double>& v, const std::vector<double>& y,
           double gamma) { return prox_step(g, v, y, gamma); },
        py::arg("geometry"), py::arg("v"), py::arg("y"), py::arg("gamma"));
    m.def(
        "composite_prox_step",
        [](const BlockGeometry& g, const std::vector<double>& v, const std::vector<double>& y,
           double gamma, const RegularizerTerm& chi) {
            return composite_prox_step(g, v, y, gamma, chi);
        },
        py::arg("geometry"), py::arg("v"), py::arg("y"), py::arg("gamma"), py::arg("chi"));

    py::class_<StochasticProblem, std::shared_ptr<StochasticProblem>>(m, "StochasticProblem")
        .def_property_readonly("name", &StochasticProblem::name)
        .def_property_readonly("tag", [](const StochasticProblem& p) { return to_string(p.tag()); })
        .def_property_readonly("block_count",
                               [](const StochasticProblem& p) { return p.structure().block_count(); })
        .def_property_readonly("dim", [](const StochasticProblem& p) { return p.structure().dim(); })
        .def_property_readonly("M", [](const StochasticProblem& p) { return p.M(); })
        .def_property_readonly("L", [](const StochasticProblem& p) { return p.L(); })
        .def_property_readonly("sigma", [](const StochasticProblem& p) { return p.sigma(); })
        .def_property_readonly("mu", &StochasticProblem::mu)
        .def_property_readonly("f_star", [](const StochasticProblem& p) { return p.f_star(); })
        .def_property_readonly("phi_star", [](const StochasticProblem& p) { return p.phi_star(); })
        .def_property_readonly("omega_min_point",
                               [](const StochasticProblem& p) {
                                   return p.setup().omega_min_point().values();
                               })
        .def("objective",
             [](const StochasticProblem& p, const std::vector<double>& x) {
                 return p.objective(to_block_vector(p, x));
             })
        .def("composite_objective",
             [](const StochasticProblem& p, const std::vector<double>& x) {
                 return p.composite_objective(to_block_vector(p, x));
             })
        .def("grad",
             [](const StochasticProblem& p, const std::vector<double>& x) {
                 std::vector<double> g(x.size());
                 p.grad_exact(to_block_vector(p, x), g);
                 return g;
             });

    m.def("make_p1", [](int n, int b, double delta, double box_lower, double box_upper,
                        double center) {
              return make_p1_nonsmooth(n, b, delta, box_lower, box_upper, center);
          },
          py::arg("n"), py::arg("b"), py::arg("delta"), py::arg("box_lower") = -1.0,
          py::arg("box_upper") = 1.0, py::arg("center") = 0.0);
    m.def("make_p2", &make_p2_strongly, py::arg("n"), py::arg("b"), py::arg("delta"),
          py::arg("mu"), py::arg("box_lower") = -1.0, py::arg("box_upper") = 1.0,
          py::arg("center") = 0.0);
    m.def("make_p3", &make_p3_composite, py::arg("a_diag"), py::arg("b_vec"), py::arg("b"),
          py::arg("lambda_"), py::arg("sigma"), py::arg("strongly") = false);
    m.def("make_p4", &make_p4_nonconvex, py::arg("n"), py::arg("b"), py::arg("lambda_"),
          py::arg("sigma"), py::arg("box_lower") = -1.0, py::arg("box_upper") = 1.0);

    py::class_<StepsizePlan>(m, "StepsizePlan")
        .def_property_readonly("kind", [](const StepsizePlan& p) { return to_string(p.kind()); })
        .def_property_readonly("gammas", &StepsizePlan::gammas)
        .def_property_readonly("thetas", &StepsizePlan::thetas)
        .def_property_readonly("probabilities", &StepsizePlan::probabilities)
        .def_property_readonly("output_weights", &StepsizePlan::output_weights);

    m.def("plan_nonsmooth_a", &plan_nonsmooth_a, py::arg("D"), py::arg("M"), py::arg("N"));
    m.def("plan_nonsmooth_b", &plan_nonsmooth_b, py::arg("D_tilde"), py::arg("M"), py::arg("b"),
          py::arg("N"));
    m.def("plan_strongly", &plan_strongly, py::arg("b"), py::arg("Q"), py::arg("mu"), py::arg("N"));
    m.def("plan_composite", &plan_composite, py::arg("b"), py::arg("L_bar"), py::arg("sigma"),
          py::arg("D_tilde"), py::arg("N"));
    m.def("plan_composite_strongly", &plan_composite_strongly, py::arg("b"), py::arg("Q"),
          py::arg("mu"), py::arg("L_bar"), py::arg("N"));
    m.def("plan_nonconvex", &plan_nonconvex, py::arg("L"), py::arg("p"), py::arg("N"));

    m.def(
        "sbmd_run",
        [](std::shared_ptr<StochasticProblem> problem, const StepsizePlan& plan,
           const std::vector<double>& x1, int N, std::uint64_t seed, std::uint64_t trial) {
            TrialRng rng(seed, trial);
            return record_to_dict(sbmd_run(*problem, problem->setup(), plan,
                                           to_block_vector(*problem, x1), N, rng, seed + trial));
        },
        py::arg("problem"), py::arg("plan"), py::arg("x1"), py::arg("N"), py::arg("seed"),
        py::arg("trial") = 0);
    m.def(
        "sbmd_composite_run",
        [](std::shared_ptr<StochasticProblem> problem, const StepsizePlan& plan,
           const std::vector<double>& x1, int N, std::uint64_t seed, std::uint64_t trial) {
            TrialRng rng(seed, trial);
            return record_to_dict(sbmd_composite_run(*problem, problem->setup(), plan,
                                                     to_block_vector(*problem, x1), N, rng,
                                                     seed + trial));
        },
        py::arg("problem"), py::arg("plan"), py::arg("x1"), py::arg("N"), py::arg("seed"),
        py::arg("trial") = 0);
    m.def(
        "sbmd_nonconvex_run",
        [](std::shared_ptr<StochasticProblem> problem, const StepsizePlan& plan,
           const std::vector<double>& x1, int N, int T, std::uint64_t seed, std::uint64_t trial,
           bool check_lemma) {
            TrialRng rng(seed, trial);
            return record_to_dict(sbmd_nonconvex_run(*problem, problem->setup(), plan,
                                                     to_block_vector(*problem, x1), N, T, rng,
                                                     seed + trial, check_lemma));
        },
        py::arg("problem"), py::arg("plan"), py::arg("x1"), py::arg("N"), py::arg("T"),
        py::arg("seed"), py::arg("trial") = 0, py::arg("check_lemma") = true);
    m.def(
        "md_sa_run",
        [](std::shared_ptr<StochasticProblem> problem, const std::vector<double>& gamma,
           const std::vector<double>& theta, const std::vector<double>& x1, int N,
           std::uint64_t seed, std::uint64_t trial) {
            TrialRng rng(seed, trial);
            return record_to_dict(md_sa_run(*problem, problem->setup(), gamma, theta,
                                            to_block_vector(*problem, x1), N, rng, seed + trial));
        },
        py::arg("problem"), py::arg("gamma"), py::arg("theta"), py::arg("x1"), py::arg("N"),
        py::arg("seed"), py::arg("trial") = 0);

    m.def(
        "projected_gradient",
        [](std::shared_ptr<StochasticProblem> problem, const std::vector<double>& x,
           const std::vector<double>& y, double gamma) {
            return projected_gradient(problem->setup(), problem->regularizer(),
                                      to_block_vector(*problem, x), y, gamma)
                .values();
        },
        py::arg("problem"), py::arg("x"), py::arg("y"), py::arg("gamma"));

    m.def("bound_value", [](const std::string& kind, long N, int b, std::vector<double> D,
                            std::vector<double> M, py::object D_tilde, py::object Q, py::object mu,
                            py::object L_bar, py::object sigma, py::object k0, py::object dphi,
                            py::object V1, py::object lambda, py::object T) {
              return bound_value(spec_from_kwargs(kind, b, std::move(D), std::move(M), D_tilde, Q,
                                                  mu, L_bar, sigma, k0, dphi, V1, lambda, T),
                                 N);
          },
          py::arg("kind"), py::arg("N"), py::arg("b") = 0, py::arg("D") = std::vector<double>{},
          py::arg("M") = std::vector<double>{}, py::arg("D_tilde") = py::none(),
          py::arg("Q") = py::none(), py::arg("mu") = py::none(), py::arg("L_bar") = py::none(),
          py::arg("sigma") = py::none(), py::arg("k0") = py::none(), py::arg("dphi") = py::none(),
          py::arg("V1") = py::none(), py::arg("lambda_") = py::none(), py::arg("T") = py::none());
    m.def("tail_bound", &tail_bound, py::arg("lambda_"));

    m.def("experiment_csv",
          [](const std::string& config_text, int jobs) {
              return experiment_csv(parse_config(config_text), jobs);
          },
          py::arg("config_text"), py::arg("jobs") = 1);
    m.def("run_verification", []() {
        py::list out;
        for (const auto& c : run_verification()) {
            py::dict d;
            d["name"] = c.name;
            d["pass"] = c.pass;
            d["detail"] = c.detail;
            out.append(d);
        }
        return out;
    });
}
