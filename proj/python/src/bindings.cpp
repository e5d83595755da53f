#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "minority/cli.hpp"
#include "minority/engine.hpp"
#include "minority/errors.hpp"
#include "minority/kpr.hpp"
#include "minority/payoff.hpp"
#include "minority/solver.hpp"
#include "minority/stats.hpp"

namespace py = pybind11;
using namespace minority;

namespace {

py::dict to_dict(const PayoffQuadruple& q) {
    py::dict d;
    d["minority_stay"] = q.minority_stay;
    d["minority_switch"] = q.minority_switch;
    d["majority_stay"] = q.majority_stay;
    d["majority_switch"] = q.majority_switch;
    return d;
}

}  // namespace

PYBIND11_MODULE(_minority, m) {
    m.doc() = "Win-stay lose-shift minority game solver and simulator";

    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_RuntimeError);
    (void)config_error;

    m.attr("__version__") = cli::version();

    // solver
    m.def("indifference_residual", &indifference_residual, py::arg("lam"), py::arg("delta"));
    m.def("solve_lambda", &solve_lambda, py::arg("delta"), py::arg("tolerance") = kDefaultSolverTolerance);
    m.def("lambda_gap", &lambda_gap, py::arg("delta"), py::arg("tolerance") = kDefaultSolverTolerance);
    m.def("solve_p_finite", &solve_p_finite, py::arg("delta"), py::arg("half_size"),
          py::arg("tolerance") = kDefaultSolverTolerance);
    m.def(
        "lambda_table",
        [](std::int64_t delta_max, double tolerance) { return LambdaTable::build(delta_max, tolerance).entries(); },
        py::arg("delta_max"), py::arg("tolerance") = kDefaultSolverTolerance,
        "Solved lambda for delta = 1..delta_max.");

    // payoff
    m.def(
        "expected_payoffs", [](std::int64_t delta, double lam) { return to_dict(expected_payoffs(delta, lam)); },
        py::arg("delta"), py::arg("lam"));
    m.def(
        "verify_no_cheat",
        [](std::int64_t delta, double lam, double tol) {
            const NoCheatReport r = verify_no_cheat(delta, lam, tol);
            py::dict d;
            d["holds"] = r.holds;
            d["majority_margin"] = r.majority_margin;
            d["minority_margin"] = r.minority_margin;
            return d;
        },
        py::arg("delta"), py::arg("lam"), py::arg("tol") = 1e-8);
    m.def(
        "infeasibility_scan",
        [](double lo, double hi, std::size_t n, double tol) {
            const InfeasibilityReport r = infeasibility_scan(log_grid(lo, hi, n), tol);
            py::dict d;
            d["points"] = r.points;
            d["min_joint_residual"] = r.min_joint_residual;
            d["argmin"] = r.argmin;
            d["joint_roots"] = r.joint_roots;
            d["orderings_hold"] = r.orderings_hold;
            return d;
        },
        py::arg("lo") = 0.05, py::arg("hi") = 20.0, py::arg("n") = 50, py::arg("tol") = 1e-4);
    m.def(
        "payoff_curve",
        [](std::int64_t delta_max) {
            py::list rows;
            for (const PayoffRow& r : payoff_curve(delta_max)) {
                py::dict d = to_dict(r.payoffs);
                d["delta"] = r.delta;
                d["lambda"] = r.lambda;
                rows.append(d);
            }
            return rows;
        },
        py::arg("delta_max"));

    // engine
    py::class_<StrategyConfig>(m, "StrategyConfig")
        .def(py::init([](std::int64_t n, double epsilon, std::int64_t wait_t, double reset_prefactor,
                         const std::string& lambda_source, std::int64_t delta_max, std::uint64_t seed,
                         const std::string& mode) {
                 StrategyConfig c;
                 c.population = n;
                 c.epsilon = epsilon;
                 c.wait_t = wait_t;
                 c.reset_prefactor = reset_prefactor;
                 c.lambda_source = parse_lambda_source(lambda_source);
                 c.delta_max = delta_max;
                 c.seed = seed;
                 c.mode = parse_mode(mode);
                 c.validate();
                 return c;
             }),
             py::arg("n") = 2001, py::arg("epsilon") = 0.5, py::arg("wait_t") = 0, py::arg("reset_prefactor") = 0.5,
             py::arg("lambda_source") = "poisson", py::arg("delta_max") = 0, py::arg("seed") = 0,
             py::arg("mode") = "strategy")
        .def_readwrite("n", &StrategyConfig::population)
        .def_readwrite("epsilon", &StrategyConfig::epsilon)
        .def_readwrite("wait_t", &StrategyConfig::wait_t)
        .def_readwrite("reset_prefactor", &StrategyConfig::reset_prefactor)
        .def_readwrite("delta_max", &StrategyConfig::delta_max)
        .def_readwrite("seed", &StrategyConfig::seed)
        .def_property_readonly("mode", [](const StrategyConfig& c) { return to_string(c.mode); })
        .def_property_readonly("lambda_source", [](const StrategyConfig& c) { return to_string(c.lambda_source); })
        .def("validate", &StrategyConfig::validate)
        .def("reset_probability", &StrategyConfig::reset_probability);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("population", &Trajectory::population)
        .def_readonly("deltas", &Trajectory::deltas)
        .def_readonly("minority_side", &Trajectory::minority_side)
        .def_readonly("reset_days", &Trajectory::reset_days)
        .def_property_readonly("has_choices", [](const Trajectory& t) { return t.choices.has_value(); })
        .def("__len__", &Trajectory::length);

    m.def("run", &run, py::arg("config"), py::arg("steps"), py::arg("record_choices") = false,
          "Simulates `steps` days (day 0 included).");

    // stats
    m.def("inefficiency_eta", &inefficiency_eta, py::arg("traj"), py::arg("burn_in") = 0);
    m.def("delta_histogram", &delta_histogram, py::arg("traj"), py::arg("burn_in") = 0);
    m.def("s_autocorrelation", &s_autocorrelation, py::arg("traj"), py::arg("tau_max"), py::arg("burn_in") = 0);
    m.def("c_autocorrelation", &c_autocorrelation, py::arg("traj"), py::arg("tau_max"), py::arg("burn_in") = 0);
    m.def("fit_decay_rate", &fit_decay_rate, py::arg("acf"), py::arg("first") = 1, py::arg("last") = 3);
    m.def(
        "convergence_time",
        [](const Trajectory& t) {
            const ConvergenceStats s = convergence_time(t);
            py::dict d;
            d["episodes"] = s.episodes;
            d["post_reset_abs_delta"] = s.post_reset_abs_delta;
            d["mean"] = s.mean;
            d["median"] = s.median;
            d["max"] = s.max;
            return d;
        },
        py::arg("traj"));

    // kpr
    m.def(
        "kpr_run",
        [](std::int64_t n, std::int64_t max_steps, std::uint64_t seed, std::uint64_t index) {
            Rng rng = make_stream(seed, index);
            const KprRun r = kpr_run(n, max_steps, rng);
            py::dict d;
            d["convergence_day"] = r.convergence_day;
            d["utilization"] = r.utilization;
            d["final_position"] = r.final_state.position;
            d["final_served_rank"] = r.final_state.served_rank;
            return d;
        },
        py::arg("n"), py::arg("max_steps") = 10000, py::arg("seed") = 0, py::arg("index") = 0);

    // cli
    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line front end; returns (exit_code, stdout, stderr).");
}
