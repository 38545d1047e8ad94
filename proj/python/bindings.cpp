#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "fastreact/analysis.hpp"
#include "fastreact/barriers.hpp"
#include "fastreact/error.hpp"
#include "fastreact/problem.hpp"
#include "fastreact/reaction.hpp"
#include "fastreact/simulator.hpp"

namespace py = pybind11;
using namespace fastreact;

namespace {

py::array_t<double> vec(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

// Snapshots stacked as (times, nodes).
py::array_t<double> stack(const std::vector<Field>& fields) {
    const std::size_t n = fields.empty() ? 0 : fields.front().size();
    py::array_t<double> out({fields.size(), n});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t t = 0; t < fields.size(); ++t)
        for (std::size_t i = 0; i < n; ++i) a(t, i) = fields[t][i];
    return out;
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::dict trajectory_dict(const Trajectory& tr) {
    const Grid& g = tr.grid;
    std::vector<double> x(g.size()), y(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto p = g.position(n);
        x[n] = p[0];
        y[n] = p[1];
    }
    py::dict d;
    d["t"] = vec(tr.times);
    d["x"] = vec(x);
    if (g.dim() == 2) d["y"] = vec(y);
    d["u"] = stack(tr.u);
    if (tr.has_v()) d["v"] = stack(tr.v);
    d["dt"] = tr.meta.dt;
    d["steps"] = tr.meta.steps;
    d["scheme"] = tr.meta.scheme;
    return d;
}

py::dict profile_dict(const BarrierProfile& p) {
    py::dict d;
    d["y"] = vec(p.y);
    d["U"] = vec(p.U);
    d["dU"] = vec(p.dU);
    if (!p.V.empty()) d["V"] = vec(p.V);
    d["report"] = json_loads(barrier_report_json(p));
    return d;
}

py::dict comparison_dict(const ComparisonReport& r) {
    py::dict d;
    d["pass"] = r.pass;
    d["worst_margin"] = r.worst_margin;
    d["component"] = r.component;
    d["x"] = r.location.x;
    d["t"] = r.location.t;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fast-reaction limit solver, barrier certification and convergence analysis";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    auto assumption = py::register_exception<AssumptionError>(m, "AssumptionError", base.ptr());
    py::register_exception<SegregationError>(m, "SegregationError", assumption.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readwrite("k", &ProblemSpec::k)
        .def_readwrite("m3", &ProblemSpec::m3)
        .def_readwrite("m4", &ProblemSpec::m4)
        .def_readwrite("T", &ProblemSpec::T)
        .def_property_readonly("dim", [](const ProblemSpec& s) { return s.grid.dim(); })
        .def_property_readonly("points",
                               [](const ProblemSpec& s) {
                                   std::vector<std::size_t> p{s.grid.points(0)};
                                   if (s.grid.dim() == 2) p.push_back(s.grid.points(1));
                                   return p;
                               })
        .def("to_toml", [](const ProblemSpec& s) { return to_toml(s); })
        .def("__eq__", [](const ProblemSpec& a, const ProblemSpec& b) { return a == b; });

    m.def("parse_problem", &parse_problem, py::arg("toml_text"), py::arg("overrides") = std::vector<std::string>{});
    m.def("load_problem", &load_problem, py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
    m.def("canonical_problem", &canonical_problem, py::arg("points") = 801, py::arg("k") = 1e4, py::arg("m3") = 2.0,
          py::arg("m4") = 1.0, py::arg("T") = 0.1);

    m.def(
        "initial_data",
        [](const ProblemSpec& s) {
            const auto [u, v] = eval_initial_data(s);
            return py::make_tuple(vec(u.values), vec(v.values));
        },
        "Nodal (u0, v0).");
    m.def("policy_dt", [](const ProblemSpec& s) { return policy_dt(s, eval_initial_data(s).second.max()); });
    m.def(
        "run",
        [](const ProblemSpec& s) {
            py::gil_scoped_release release;
            Trajectory tr = run(s);
            py::gil_scoped_acquire acquire;
            return trajectory_dict(tr);
        },
        py::arg("spec"), "Simulate with the policy step; returns t, x[, y], u, v as arrays.");

    m.def(
        "reaction_substep",
        [](double u, double v, double k, double m3, double m4, double tau) {
            const ReactionState s = reaction_substep(ReactionState{u, v, 0.0}, k, m3, m4, tau);
            return py::make_tuple(s.u, s.v);
        },
        py::arg("u"), py::arg("v"), py::arg("k"), py::arg("m3"), py::arg("m4"), py::arg("tau"));
    m.def("v_exact_update", &v_exact_update, py::arg("v"), py::arg("dJ"), py::arg("m4"));
    m.def(
        "point_ode_oracle",
        [](double u0, double v0, double k, double m3, double m4, double t) {
            return point_ode_oracle(u0, v0, k, m3, m4, t);
        },
        py::arg("u0"), py::arg("v0"), py::arg("k"), py::arg("m3"), py::arg("m4"), py::arg("t"));

    m.def(
        "cosh_barrier",
        [](double a1, double m, double k) { return profile_dict(cosh_barrier(a1, m, k)); }, py::arg("a1"),
        py::arg("m"), py::arg("k"));
    m.def(
        "ode_barrier",
        [](double a2, double b2, double m, double k) { return profile_dict(ode_barrier(a2, b2, m, k)); },
        py::arg("a2"), py::arg("b2"), py::arg("m"), py::arg("k"));
    m.def(
        "traveling_supersolution",
        [](double k, double s, double a3, double b3, double c3, double m3, double m4) {
            return profile_dict(traveling_supersolution(TravelingParams{s, a3, b3, c3, m3, m4}, k));
        },
        py::arg("k"), py::arg("s") = 0.1, py::arg("a3") = 1.0, py::arg("b3") = 2.0, py::arg("c3") = 2.0,
        py::arg("m3") = 2.0, py::arg("m4") = 1.0);

    m.def(
        "k_sweep",
        [](const ProblemSpec& s, const std::vector<double>& ks) {
            std::string text;
            {
                py::gil_scoped_release release;
                text = convergence_json(k_sweep(s, ks));
            }
            return json_loads(text);
        },
        py::arg("spec"), py::arg("ks"), "Convergence report as a dict.");
    m.def(
        "random_ordered_pairs",
        [](const ProblemSpec& s, std::size_t pairs, std::uint64_t seed) {
            OrderedPairOptions o;
            o.pairs = pairs;
            o.seed = seed;
            OrderedPairSummary r;
            {
                py::gil_scoped_release release;
                r = random_ordered_pairs(s, o);
            }
            py::dict d;
            d["pass"] = r.pass;
            d["worst_margin"] = r.worst_margin;
            d["seed"] = r.seed;
            py::list reports;
            for (const auto& c : r.reports) reports.append(comparison_dict(c));
            d["reports"] = reports;
            return d;
        },
        py::arg("spec"), py::arg("pairs") = 20, py::arg("seed") = 20240611);
}
