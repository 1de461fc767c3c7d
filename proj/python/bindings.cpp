#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "colsafe/capability.hpp"
#include "colsafe/errors.hpp"
#include "colsafe/negotiation.hpp"
#include "colsafe/simulation.hpp"
#include "colsafe/trace_io.hpp"

namespace py = pybind11;
using namespace colsafe;

namespace {

py::dict summary_dict(const Summary& s) {
    py::dict d;
    d["steps"] = s.steps;
    d["min_h"] = s.min_h;
    d["max_tau"] = s.max_tau;
    d["mean_tau"] = s.mean_tau;
    d["terminally_infeasible_steps"] = s.terminally_infeasible_steps;
    d["round_cap_exceeded_steps"] = s.round_cap_steps;
    d["max_us_norm"] = s.max_us_norm;
    d["negative_h_records"] = s.negative_h_records;
    d["tree"] = s.tree;
    d["theorem2_bound"] = s.theorem2_pass;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Collaborative safety filters for mass-spring formations";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Polytope>(m, "Polytope")
        .def(py::init<Mat, Vec>(), py::arg("G"), py::arg("l"))
        .def_static("box", &Polytope::box, py::arg("lower"), py::arg("upper"))
        .def_static("linf_ball", &Polytope::linf_ball, py::arg("dim"), py::arg("radius"))
        .def_static("whole_space", &Polytope::whole_space, py::arg("dim"))
        .def_static("at_least", &Polytope::at_least, py::arg("a"), py::arg("offset"))
        .def_readonly("G", &Polytope::G)
        .def_readonly("l", &Polytope::l)
        .def_property_readonly("dim", &Polytope::dim)
        .def("__contains__", [](const Polytope& P, const Vec& u) { return contains(P, u); })
        .def("__repr__", [](const Polytope& P) {
            return "<Polytope dim=" + std::to_string(P.dim()) + " rows=" + std::to_string(P.rows()) + ">";
        });

    m.def("contains", &contains, py::arg("P"), py::arg("u"), py::arg("tol") = kMembershipTol);
    m.def("intersect", &intersect);
    m.def("is_empty", &is_empty, py::arg("P"), py::arg("tol") = kMembershipTol);
    m.def("project", &project, py::arg("P"), py::arg("point"), py::arg("tol") = kMembershipTol);
    m.def(
        "closest_points",
        [](const Polytope& a, const Polytope& b) {
            const ClosestPoints cp = closest_points(a, b);
            return py::make_tuple(cp.z1, cp.z2, cp.dist);
        },
        "(z1, z2, dist) minimizing |z1 - z2| over z1 in P1, z2 in P2");

    m.def(
        "max_min_capability",
        [](const Mat& B, const Polytope& U) {
            const CapabilityResult r = max_min_capability(B, U);
            return py::make_tuple(r.u_star, r.gamma_star);
        },
        py::arg("B"), py::arg("U"), "(u*, gamma*) maximizing min_k [B u]_k over U");

    m.def("split_deficit", &split_deficit, py::arg("delta"), py::arg("neighbors"),
          py::arg("constrained") = std::set<AgentId>{});

    m.def(
        "clearance",
        [](const Vec2& p, const Vec2& p_o, double r) {
            AgentState x;
            x.p = p;
            return h(x, Obstacle{0, p_o, Vec2::Zero(), r});
        },
        py::arg("p"), py::arg("p_o"), py::arg("r") = 1.0);

    m.def("preset_names", &preset_names);
    m.def(
        "run",
        [](const std::string& source, const std::string& out_dir) {
            const Scenario s = source.find('{') != std::string::npos ? parse_scenario(source) : preset(source);
            TraceLog log;
            {
                py::gil_scoped_release nogil;
                log = run(s);
            }
            if (!out_dir.empty()) emit_traces(log, s, out_dir);
            return summary_dict(summarize(log, s));
        },
        py::arg("scenario"), py::arg("out_dir") = "",
        "Simulate a preset name or a JSON scenario document; returns the run summary.");
    m.def(
        "report", [](const std::string& dir) {
            const LoadedTrace t = read_traces(dir);
            return summary_dict(summarize(t.log, t.scenario));
        },
        py::arg("trace_dir"));
}
