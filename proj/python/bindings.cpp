#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "disloc/dislocation.hpp"
#include "disloc/error.hpp"
#include "disloc/io.hpp"
#include "disloc/oracle.hpp"
#include "disloc/transfer.hpp"

namespace py = pybind11;
using namespace disloc;

namespace {

py::list mat(const RMat2& m) { return py::cast(std::vector<std::vector<double>>{{m.a, m.b}, {m.c, m.d}}); }

} // namespace

PYBIND11_MODULE(_disloc, m) {
    m.doc() = "Eigenvalues and resonances in the gaps of a periodic Dirac system cut and shifted at the origin";

    // exception type with a machine-readable code attribute
    static PyObject* error = PyErr_NewException("disloc.DislocError", PyExc_RuntimeError, nullptr);
    m.attr("DislocError") = py::handle(error);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error)(e.what());
            exc.attr("code") = e.code();
            PyErr_SetObject(error, exc.ptr());
        }
    });

    py::class_<Potential>(m, "Potential")
        .def(py::init<std::vector<double>, std::vector<double>, std::vector<double>>(), py::arg("breakpoints"),
             py::arg("q1"), py::arg("q2"))
        .def_property_readonly("breakpoints", &Potential::breakpoints)
        .def_property_readonly("q1", &Potential::q1_values)
        .def_property_readonly("q2", &Potential::q2_values)
        .def("value_at", &Potential::value_at, py::arg("x"))
        .def("shift", &Potential::shift, py::arg("t"))
        .def("is_even_class", &Potential::is_even_class, py::arg("tol") = 1e-12)
        .def("norm_p", &Potential::norm_p)
        .def("norm_inf", &Potential::norm_inf)
        .def("to_json", [](const Potential& v) { return to_json(v).dump(); })
        .def_static("from_json", [](const std::string& s) { return potential_from_json(Json::parse(s)); })
        .def_static("zero", &Potential::zero)
        .def_static("constant", &Potential::constant, py::arg("q1"), py::arg("q2") = 0.0)
        .def_static("two_step", &Potential::two_step, py::arg("c"), py::arg("m") = 0.0)
        .def_static("edge_mass", &Potential::edge_mass, py::arg("c"), py::arg("delta"), py::arg("c2"))
        .def("__len__", &Potential::size);

    py::class_<SurfacePoint>(m, "SurfacePoint")
        .def(py::init([](double lambda, int sheet, int edge) { return SurfacePoint{lambda, sheet, edge}; }),
             py::arg("lam"), py::arg("sheet") = 1, py::arg("edge") = 0)
        .def_readwrite("lam", &SurfacePoint::lambda)
        .def_readwrite("sheet", &SurfacePoint::sheet)
        .def_readwrite("edge", &SurfacePoint::edge)
        .def("is_edge", &SurfacePoint::is_edge)
        .def("__repr__", [](const SurfacePoint& p) { return "SurfacePoint(" + to_json(p).dump() + ")"; });

    py::class_<GapInfo>(m, "GapInfo")
        .def_readonly("n", &GapInfo::n)
        .def_readonly("alpha_minus", &GapInfo::alpha_minus)
        .def_readonly("alpha_plus", &GapInfo::alpha_plus)
        .def_readonly("mu", &GapInfo::mu)
        .def_readonly("nu", &GapInfo::nu)
        .def_readonly("mass_minus", &GapInfo::mass_minus)
        .def_readonly("mass_plus", &GapInfo::mass_plus)
        .def_readonly("closed", &GapInfo::closed)
        .def("width", &GapInfo::width)
        .def("to_json", [](const GapInfo& g) { return to_json(g).dump(); });

    py::enum_<StateKind>(m, "StateKind")
        .value("eigenvalue", StateKind::eigenvalue)
        .value("resonance", StateKind::resonance)
        .value("virtual_state", StateKind::virtual_state);

    py::class_<State>(m, "State")
        .def_readonly("point", &State::point)
        .def_readonly("angle", &State::angle)
        .def_readonly("residual", &State::residual)
        .def_readonly("kind", &State::kind)
        .def("to_json", [](const State& s) { return to_json(s).dump(); });

    py::class_<Monodromy>(m, "Monodromy")
        .def_property_readonly("psi", [](const Monodromy& x) { return mat(x.psi); })
        .def_property_readonly("dpsi", [](const Monodromy& x) { return mat(x.dpsi); })
        .def("delta", &Monodromy::delta)
        .def("a", &Monodromy::a);

    m.def("fundamental", [](const Potential& v, double x, double lam, double t) { return mat(fundamental(v, x, lam, t)); },
          py::arg("v"), py::arg("x"), py::arg("lam"), py::arg("t") = 0.0);
    m.def("monodromy", py::overload_cast<const Potential&, double, double>(&monodromy), py::arg("v"), py::arg("lam"),
          py::arg("t") = 0.0);
    m.def("phi_norm_sq", &phi_norm_sq, py::arg("v"), py::arg("lam"), py::arg("t") = 0.0);
    m.def("band_edges", &band_edges, py::arg("v"), py::arg("lo"), py::arg("hi"), py::arg("grid") = 4000);
    m.def("find_gap", &find_gap, py::arg("gaps"), py::arg("n"));
    m.def("dirichlet_point", &dirichlet_point, py::arg("v"), py::arg("gap"), py::arg("t"));
    m.def("neumann_point", &neumann_point, py::arg("v"), py::arg("gap"), py::arg("t"));
    m.def("b_sheeted", &b_sheeted, py::arg("v"), py::arg("gap"), py::arg("p"));
    m.def(
        "locate_states",
        [](const Potential& v, const GapInfo& g, double t) { return locate_states(v, g, t); }, py::arg("v"),
        py::arg("gap"), py::arg("t"));
    m.def(
        "check_sign_lemma", [](const Potential& v, const GapInfo& g, const State& s, double t) {
            auto c = check_sign_lemma(v, g, s, t);
            return py::dict(py::arg("rule") = c.rule, py::arg("value") = c.value,
                            py::arg("expected_sign") = c.expected_sign, py::arg("ok") = c.ok);
        },
        py::arg("v"), py::arg("gap"), py::arg("state"), py::arg("t"));
    m.def(
        "track_states",
        [](const Potential& v, const GapInfo& g, double t0, double t1, int samples) {
            TrackControl ctrl;
            ctrl.samples = samples;
            auto tr = track_states(v, g, t0, t1, ctrl);
            py::list rows;
            for (const auto& s : tr.samples) rows.append(py::make_tuple(s.t, s.plus, s.minus));
            return py::dict(py::arg("samples") = rows, py::arg("winding_plus") = tr.winding_plus,
                            py::arg("winding_minus") = tr.winding_minus, py::arg("summary") = track_summary(g, tr).dump());
        },
        py::arg("v"), py::arg("gap"), py::arg("t0"), py::arg("t1"), py::arg("samples") = 101);
    m.def(
        "eigenvalue_oracle", [](const Potential& v, const GapInfo& g, double t) { return eigenvalue_oracle(v, g, t); },
        py::arg("v"), py::arg("gap"), py::arg("t"));
    m.def(
        "resonance_oracle", [](const Potential& v, const GapInfo& g, double t) { return resonance_oracle(v, g, t); },
        py::arg("v"), py::arg("gap"), py::arg("t"));
}
