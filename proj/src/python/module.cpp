#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "driftev/asymptotics.hpp"
#include "driftev/bounds.hpp"
#include "driftev/cli.hpp"
#include "driftev/eigensolve1d.hpp"
#include "driftev/error.hpp"
#include "driftev/pde2d.hpp"
#include "driftev/sweep.hpp"
#include "driftev/wells.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace driftev;

namespace {

template <class T>
std::vector<double> to_vec(std::span<const T> s) {
    return {s.begin(), s.end()};
}

py::dict well_dict(const Well& w) {
    return py::dict("x"_a = w.x, "y"_a = w.y, "min_value"_a = w.min_value, "barrier_value"_a = w.barrier_value,
                    "depth"_a = w.depth, "basin_level"_a = w.basin_level,
                    "dies_into_boundary"_a = w.dies_into_boundary);
}

py::dict report_dict(const WellReport& r) {
    py::list wells;
    for (const Well& w : r.wells) wells.append(well_dict(w));
    return py::dict("wells"_a = wells, "b0"_a = r.b0);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Principal eigenvalues of -Lap + p a.grad with gradient drift";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            py::set_error(PyExc_ValueError, e.what());
        }
    });

    py::class_<Grid1D>(m, "Grid1D")
        .def(py::init<double, std::size_t>(), "l"_a, "n"_a)
        .def_readonly("l", &Grid1D::l)
        .def_readonly("n", &Grid1D::n)
        .def_readonly("h", &Grid1D::h)
        .def("x", &Grid1D::x);

    py::class_<Grid2D>(m, "Grid2D")
        .def(py::init<double, double, std::size_t, std::size_t>(), "lx"_a, "ly"_a, "nx"_a, "ny"_a)
        .def_readonly("nx", &Grid2D::nx)
        .def_readonly("ny", &Grid2D::ny)
        .def_readonly("hx", &Grid2D::hx)
        .def_readonly("hy", &Grid2D::hy);

    py::class_<PotentialSpec>(m, "PotentialSpec")
        .def_static("from_id", &PotentialSpec::from_id, "id"_a, "alpha"_a = 2.0, "c"_a = 0.0)
        .def_property_readonly("id", &PotentialSpec::id)
        .def_readonly("alpha", &PotentialSpec::alpha)
        .def_readonly("c", &PotentialSpec::c);

    py::class_<Potential1D>(m, "Potential1D")
        .def_property_readonly("grid", &Potential1D::grid)
        .def_property_readonly("name", &Potential1D::name)
        .def_property_readonly("b", [](const Potential1D& p) { return to_vec(p.b()); })
        .def_property_readonly("a", [](const Potential1D& p) { return to_vec(p.a()); })
        .def("b_at", &Potential1D::b_at);
    m.def("build_potential_1d", &build_potential_1d, "spec"_a, "grid"_a);
    m.def("liouville_q", py::overload_cast<const Potential1D&, double>(&liouville_q), "pot"_a, "p"_a);

    py::class_<FieldSpec>(m, "FieldSpec")
        .def_static("from_id", &FieldSpec::from_id, "id"_a, "radius"_a = 0.5, "c1"_a = 0.0, "c2"_a = 0.0)
        .def_static("vortex", &FieldSpec::vortex, "radius"_a = 0.5)
        .def_static("two_bump", &FieldSpec::two_bump);
    py::class_<Field2D>(m, "Field2D").def_property_readonly("name", &Field2D::name);
    m.def("build_field_2d", &build_field_2d, "spec"_a, "grid"_a);

    py::class_<TridiagPencil>(m, "TridiagPencil")
        .def_property_readonly("n", &TridiagPencil::n)
        .def_property_readonly("scale_log", &TridiagPencil::scale_log)
        .def_property_readonly("diag_M", &TridiagPencil::diag_M);
    m.def("assemble_pencil", &assemble_pencil, "pot"_a, "p"_a);

    py::class_<EigenPair>(m, "EigenPair")
        .def_readonly("lambda_", &EigenPair::lambda)
        .def_readonly("u", &EigenPair::u)
        .def_readonly("residual", &EigenPair::residual)
        .def_readonly("index", &EigenPair::index);
    m.def("principal_eig", &principal_eig, "pencil"_a, "rtol"_a = 1e-10, "max_iter"_a = 10000);
    m.def("eigs_bisection", &eigs_bisection, "pencil"_a, "m"_a, "rtol"_a = 1e-10);
    m.def("adjoint_eigenfunction", &adjoint_eigenfunction, "pair"_a, "pot"_a, "p"_a);

    py::class_<AsymptoticValue>(m, "AsymptoticValue")
        .def_readonly("log_lambda", &AsymptoticValue::log_lambda)
        .def_readonly("form", &AsymptoticValue::form)
        .def_readonly("unreliable", &AsymptoticValue::unreliable);
    m.def("product_formula", &product_formula, "pot"_a, "p"_a);
    m.def("closed_form", &closed_form, "spec"_a, "l"_a, "p"_a);
    m.def(
        "laplace_integral",
        [](const std::function<double(double)>& g, double L, double mu, double p) {
            return laplace_integral(g, L, mu, p).log_value;
        },
        "g"_a, "L"_a, "mu"_a, "p"_a, "log of the integral of exp(-p g) over [0, L]");
    m.def("laplace_predict", &laplace_predict, "mu"_a, "p"_a);

    m.def("detect_wells", [](const Potential1D& pot) { return report_dict(detect_wells(pot)); }, "pot"_a);
    m.def("detect_wells_2d", [](const Field2D& f) { return report_dict(detect_wells(f)); }, "field"_a);

    m.def(
        "p2_envelope", [](const Potential1D& pot, double p) {
            const BoundReport r = p2_envelope(pot, p);
            return py::make_tuple(r.lower, r.upper);
        },
        "pot"_a, "p"_a);

    m.def(
        "run_sweep",
        [](const PotentialSpec& spec, double l, std::vector<double> ps, std::size_t n) {
            SweepOptions opt;
            opt.n = n;
            const SweepResult r = run_sweep(spec, l, std::move(ps), opt);
            py::list rows;
            for (const SweepRow& row : r.rows)
                rows.append(py::dict("p"_a = row.p, "lambda_solver"_a = row.lambda_solver,
                                     "log_lambda_asym"_a = row.log_lambda_asym, "log_upper"_a = row.log_upper,
                                     "lower"_a = row.lower, "rate_running"_a = row.rate_running));
            py::dict fit("applicable"_a = r.fit.applicable, "b0"_a = r.fit.b0, "half_width"_a = r.fit.half_width,
                         "reason"_a = r.fit.reason);
            return py::dict("rows"_a = rows, "fit"_a = fit, "b0_detected"_a = r.b0_detected);
        },
        "spec"_a, "l"_a, "p_list"_a, "n"_a = 4001);

    m.def(
        "decay_rate",
        [](const Field2D& field, double p, double t_end, double tau) {
            DecayOptions opt;
            opt.t_end = t_end;
            opt.tau = tau;
            py::gil_scoped_release release;
            return estimate_decay(field, p, opt).fit.rate_l2;
        },
        "field"_a, "p"_a, "t_end"_a = 1.0, "tau"_a = 5e-4);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "driftev");
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "args"_a, "Runs the command line in-process; returns (exit code, stdout, stderr).");
}
