#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edrlab/cli.hpp"
#include "edrlab/grid.hpp"
#include "edrlab/model_io.hpp"
#include "edrlab/models.hpp"
#include "edrlab/povm.hpp"
#include "edrlab/process.hpp"
#include "edrlab/unbiasing.hpp"

namespace py = pybind11;
using namespace edrlab;

namespace {

QState as_state(const CVector& amplitudes, const Tolerances& tol) {
  return QState(amplitudes, tol.state_norm);
}

MeterFunction as_function(const py::object& f) {
  if (f.is_none()) return MeterFunction::identity();
  if (py::isinstance<py::str>(f)) return MeterFunction::parse(f.cast<std::string>());
  return f.cast<MeterFunction>();
}

py::dict report_dict(const EDRReport& r) {
  py::dict d;
  d["epsilon"] = r.epsilon;
  d["delta"] = r.delta;
  d["eta"] = r.eta;
  d["epsilon_sq"] = r.epsilon_sq;
  d["delta_sq"] = r.delta_sq;
  d["eta_sq"] = r.eta_sq;
  d["sigma_x"] = r.sigma_x;
  d["sigma_p"] = r.sigma_p;
  d["prod_eps_eta"] = r.prod_eps_eta;
  d["prod_delta_eta"] = r.prod_delta_eta;
  d["deficit"] = r.unbiasedness_deficit;
  d["hbar_half"] = r.hbar_half;
  d["h"] = r.h;
  return d;
}

ModelSpec make_spec(const std::string& kind, Index n_obj, double dx_obj,
                    Index n_probe, double dx_probe, double hbar,
                    double coupling, double x0, double p0, double sigma,
                    std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = parse_model_kind(kind);
  spec.grid_obj = GridSpec{n_obj, dx_obj, hbar};
  spec.grid_probe = GridSpec{n_probe, dx_probe, hbar};
  spec.coupling = coupling;
  spec.probe = GaussianParams{x0, p0, sigma};
  spec.seed = seed;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Error, disturbance and resolution of finite-dimensional measuring processes";

  py::register_exception<Error>(m, "EdrlabError", PyExc_RuntimeError);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def("set", &Tolerances::set, py::arg("key"), py::arg("value"))
      .def("as_dict", &Tolerances::as_map);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](Index n, double dx, double hbar) { return GridSpec{n, dx, hbar}; }),
           py::arg("n") = 64, py::arg("dx") = 1.0, py::arg("hbar") = 1.0)
      .def_readwrite("n", &GridSpec::n)
      .def_readwrite("dx", &GridSpec::dx)
      .def_readwrite("hbar", &GridSpec::hbar)
      .def("validate", &GridSpec::validate)
      .def("window", &GridSpec::window)
      .def("positions", [](const GridSpec& g) { return grid_positions(g); })
      .def("momenta", [](const GridSpec& g) { return grid_momenta(g); })
      .def("position_op", [](const GridSpec& g) { return position_op(g).matrix(); })
      .def("momentum_op", [](const GridSpec& g) { return momentum_op(g).matrix(); })
      .def("gaussian", [](const GridSpec& g, double x0, double p0, double sigma) {
             return CVector(gaussian_state(g, x0, p0, sigma).amplitudes());
           },
           py::arg("x0"), py::arg("p0"), py::arg("sigma"));

  py::class_<MeterFunction>(m, "MeterFunction")
      .def_static("identity", &MeterFunction::identity)
      .def_static("affine", &MeterFunction::affine, py::arg("slope"), py::arg("offset"))
      .def_static("polynomial", &MeterFunction::polynomial, py::arg("coefficients"))
      .def_static("tabulated", &MeterFunction::tabulated, py::arg("values"), py::arg("images"))
      .def_static("parse", &MeterFunction::parse, py::arg("text"))
      .def("evaluate", &MeterFunction::evaluate, py::arg("m"), py::arg("match_tol") = 1e-9)
      .def("__repr__", &MeterFunction::describe);

  py::class_<MeasurementProcess>(m, "Process")
      .def_property_readonly("n_object", [](const MeasurementProcess& p) { return p.dims().object; })
      .def_property_readonly("n_probe", [](const MeasurementProcess& p) { return p.dims().probe; })
      .def_property_readonly("hbar", &MeasurementProcess::hbar)
      .def_property_readonly("probe_state",
                             [](const MeasurementProcess& p) { return CVector(p.probe_state().amplitudes()); })
      .def_property_readonly("isometry", &MeasurementProcess::isometry)
      .def_property_readonly("measured", [](const MeasurementProcess& p) { return p.measured().matrix(); })
      .def_property_readonly("disturbed", [](const MeasurementProcess& p) { return p.disturbed().matrix(); })
      .def_property_readonly("meter", [](const MeasurementProcess& p) { return p.meter().matrix(); })
      .def("unitary", [](const MeasurementProcess& p) { return p.interaction().dense(); })
      .def("report",
           [](const MeasurementProcess& p, const CVector& psi, const py::object& f) {
             return report_dict(edr_report(p, as_state(psi, p.tolerances()), as_function(f)));
           },
           py::arg("psi"), py::arg("f") = py::none())
      .def("epsilon",
           [](const MeasurementProcess& p, const CVector& psi) {
             return epsilon(p, as_state(psi, p.tolerances())).value;
           },
           py::arg("psi"))
      .def("delta",
           [](const MeasurementProcess& p, const CVector& psi, const py::object& f) {
             return delta(p, as_state(psi, p.tolerances()), as_function(f)).value;
           },
           py::arg("psi"), py::arg("f") = py::none())
      .def("eta",
           [](const MeasurementProcess& p, const CVector& psi) {
             return eta(p, as_state(psi, p.tolerances())).value;
           },
           py::arg("psi"))
      .def("deficit",
           [](const MeasurementProcess& p, const py::object& f) {
             auto d = unbiasedness_deficit(p, as_function(f));
             return py::make_tuple(d.norm, d.op.matrix());
           },
           py::arg("f") = py::none())
      .def("povm",
           [](const MeasurementProcess& p) {
             auto set = extract_povm(p);
             py::list out;
             for (const auto& o : set.outcomes) out.append(py::make_tuple(o.value, o.element.matrix()));
             return out;
           })
      .def("probabilities",
           [](const MeasurementProcess& p, const CVector& psi) {
             return extract_povm(p).probabilities(as_state(psi, p.tolerances()));
           },
           py::arg("psi"))
      .def("born_check",
           [](const MeasurementProcess& p) {
             auto b = born_check(p);
             return py::make_tuple(b.max_deviation, b.is_born);
           })
      .def("solve_unbiased_f",
           [](const MeasurementProcess& p) {
             auto s = solve_unbiased_f(p);
             py::dict d;
             d["f"] = s.f_star;
             d["values"] = deficit_components(p).cluster_values;
             d["images"] = s.images;
             d["residual"] = s.residual;
             d["feasible"] = s.feasible;
             return d;
           })
      .def("min_delta_f",
           [](const MeasurementProcess& p, const CVector& psi) {
             auto o = min_delta_f(p, as_state(psi, p.tolerances()));
             py::dict d;
             d["f"] = o.f_star;
             d["images"] = o.images;
             d["delta_min"] = o.delta_min;
             return d;
           },
           py::arg("psi"))
      .def("to_json", [](const MeasurementProcess& p) { return process_to_json(p).dump(); })
      .def("save", [](const MeasurementProcess& p, const std::filesystem::path& path) { save_process(p, path); },
           py::arg("path"));

  m.def("model",
        [](const std::string& kind, Index n, double dx, std::optional<Index> obj_n,
           std::optional<double> obj_dx, double hbar, double coupling, double x0, double p0,
           double sigma, std::uint64_t seed) {
          return build_model(make_spec(kind, obj_n.value_or(n), obj_dx.value_or(dx), n, dx, hbar,
                                       coupling, x0, p0, sigma, seed));
        },
        py::arg("kind"), py::arg("n") = 64, py::arg("dx") = 1.0, py::arg("obj_n") = py::none(),
        py::arg("obj_dx") = py::none(), py::arg("hbar") = 1.0, py::arg("coupling") = 1.0,
        py::arg("x0") = 0.0, py::arg("p0") = 0.0, py::arg("sigma") = 1.0, py::arg("seed") = 0);

  m.def("load", [](const std::filesystem::path& path) { return load_custom(path); }, py::arg("path"));
  m.def("from_json", [](const std::string& text) { return process_from_json(nlohmann::json::parse(text)); },
        py::arg("text"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::vector<const char*> argv{"edrlab"};
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
