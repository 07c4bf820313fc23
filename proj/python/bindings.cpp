#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "gvc/demos.hpp"
#include "gvc/error.hpp"
#include "gvc/forward.hpp"
#include "gvc/gradient.hpp"
#include "gvc/gronwall.hpp"
#include "gvc/optimize.hpp"

namespace py = pybind11;
using namespace gvc;

namespace {

py::array_t<double> to_array(const Field& f) {
    py::array_t<double> a({f.ni(), f.nj(), f.dim()});
    std::copy(f.values().begin(), f.values().end(), a.mutable_data());
    return a;
}

py::dict solve_demo(const std::string& name, int Ns, int Nt, std::uint64_t seed) {
    const Grid g = make_grid(1.0, 1.0, Ns, Nt);
    const Demo d = make_demo(name, g, seed);
    const ForwardResult r = solve_forward(d.problem, d.u0, g);
    py::dict out;
    out["y"] = to_array(r.y);
    out["s"] = g.s;
    out["t"] = g.t;
    out["J"] = cost(d.problem, r.y, d.u0, g);
    out["iterations"] = r.iterations;
    out["final_delta"] = r.final_delta;
    return out;
}

py::dict optimize_demo(const std::string& name, int Ns, int Nt, std::uint64_t seed, int max_outer) {
    const Grid g = make_grid(1.0, 1.0, Ns, Nt);
    const Demo d = make_demo(name, g, seed);
    OptimizeOptions o;
    o.max_outer = max_outer;
    const OptimizeResult r = optimize(d.problem, d.u0, g, o);
    py::dict out;
    out["J_initial"] = r.history.front().J;
    out["J_final"] = r.history.back().J;
    out["stationarity"] = r.history.back().stationarity;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["u12"] = to_array(r.u.u12);
    return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"gvctl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_gvcontrol, m) {
    m.doc() = "Goursat-Volterra optimal control solvers";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("demo_names", &demo_names);
    m.def("solve_demo", &solve_demo, py::arg("name"), py::arg("Ns") = 16, py::arg("Nt") = 16, py::arg("seed") = 1,
          "Solve the state equation of a registered demo at its starting control.");
    m.def("optimize_demo", &optimize_demo, py::arg("name"), py::arg("Ns") = 16, py::arg("Nt") = 16,
          py::arg("seed") = 1, py::arg("max_outer") = 200);
    m.def("choose_mu", &choose_mu, py::arg("L1"), py::arg("L2"), py::arg("L12"), py::arg("A"), py::arg("B"),
          py::arg("q_target"));
    m.def("contraction_factor", &contraction_factor, py::arg("L1"), py::arg("L2"), py::arg("L12"), py::arg("A"),
          py::arg("B"), py::arg("mu"));
    m.def("gronwall_solve", &gronwall_solve, py::arg("A0"), py::arg("B1"), py::arg("B2"), py::arg("B12"),
          py::arg("ds"), py::arg("dt"), py::arg("rel_tol") = 1e-12);
    m.def("gronwall_bound", &gronwall_bound, py::arg("A0"), py::arg("B1"), py::arg("B2"), py::arg("B12"),
          py::arg("ds"), py::arg("dt"));
    m.def("gronwall_bound_separable", &gronwall_bound_separable, py::arg("A0"), py::arg("B1"), py::arg("B2"),
          py::arg("B12"), py::arg("ds"), py::arg("dt"));
    m.def(
        "gronwall_coeffs",
        [](double A0, double B1, double B2, double B12, int kmax, int lmax) {
            return gronwall_coeffs(A0, B1, B2, B12, kmax, lmax).C;
        },
        py::arg("A0"), py::arg("B1"), py::arg("B2"), py::arg("B12"), py::arg("kmax"), py::arg("lmax"));
    m.def("run_cli", &run_cli, py::arg("args"),
          "Run a gvctl command in-process; returns (exit_code, stdout, stderr).");
}
