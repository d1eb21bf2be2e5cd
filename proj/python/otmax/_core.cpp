#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otmax/lab.hpp"

namespace py = pybind11;
using namespace otmax;

namespace {

GridDensity make_grid(int dim, double h, std::vector<double> origin,
                      std::vector<int> shape, std::vector<double> values) {
  std::array<double, 2> o{origin.at(0), dim == 2 ? origin.at(1) : 0.0};
  std::array<int, 2> s{shape.at(0), dim == 2 ? shape.at(1) : 1};
  return GridDensity(dim, h, o, s, std::move(values));
}

WeightedMeasure make_weight(const std::string& kind, double exponent) {
  if (kind == "constant") return WeightedMeasure::constant();
  if (kind == "power") return WeightedMeasure::power(exponent);
  throw std::invalid_argument("weight kind must be constant or power");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Constrained transport energy solvers";

  py::class_<GridDensity>(m, "GridDensity")
      .def(py::init(&make_grid), py::arg("dim"), py::arg("cell_width"),
           py::arg("origin"), py::arg("shape"), py::arg("values"))
      .def_property_readonly("dim", &GridDensity::dim)
      .def_property_readonly("cell_width", &GridDensity::cell_width)
      .def_property_readonly("values", &GridDensity::values)
      .def("mass", [](const GridDensity& g) { return mass(g); });

  m.def("asymmetry", [](const GridDensity& g) { return asymmetry(g); });
  m.def("rescale", &rescale, py::arg("rho"), py::arg("t"));

  m.def(
      "oracle_energy",
      [](const GridDensity& rho, double p, const std::string& filter) {
        SolveOptions opt;
        if (filter == "rightward")
          opt.filter.mode = EdgeMode::Rightward;
        else if (filter != "all")
          throw std::invalid_argument("filter must be all or rightward");
        const SolveResult res = solve_partial_ot(rho, p, opt);
        py::dict out;
        out["energy_p"] = res.energy;
        out["max_distance"] = res.max_distance;
        out["certificate_gap"] = res.certificate_gap;
        return out;
      },
      py::arg("rho"), py::arg("p") = 2.0, py::arg("filter") = "all");

  m.def(
      "sweep_energy",
      [](double x_lo, double h, std::vector<double> values,
         const std::string& kind, double exponent, double p) {
        return sweep_rightward(
                   Density1D(x_lo, h, std::move(values),
                             make_weight(kind, exponent)),
                   p)
            .energy;
      },
      py::arg("x_lo"), py::arg("cell_width"), py::arg("values"),
      py::arg("weight_kind") = "constant", py::arg("exponent") = 0.0,
      py::arg("p") = 2.0);

  m.def("radial_energy",
        [](const GridDensity& rho, double p, int n_rays) {
          return radial_energy(decompose(rho, n_rays), p);
        },
        py::arg("rho"), py::arg("p") = 2.0, py::arg("rays") = 256);

  m.def("interval_energy",
        [](double mass_, const std::string& kind, double exponent, double p) {
          return interval_energy(mass_, make_weight(kind, exponent), p);
        },
        py::arg("mass"), py::arg("weight_kind") = "constant",
        py::arg("exponent") = 0.0, py::arg("p") = 2.0);
  m.def("ball_energy_1d", &ball_energy_1d, py::arg("p"));
  m.def("ball_energy_nd", &ball_energy_nd, py::arg("dim"), py::arg("p"),
        py::arg("mass"));
  m.def("ray_length_bound", &ray_length_bound, py::arg("r"),
        py::arg("cos_theta"), py::arg("dim"));
  m.def("transport_distance_bound", &transport_distance_bound, py::arg("dim"),
        py::arg("mass"));
  m.def(
      "sharp_example",
      [](double eps, double p) {
        const SharpExample ex = sharp_example(eps, p);
        py::dict out;
        out["energy"] = ex.energy;
        out["asymmetry"] = ex.asymmetry;
        return out;
      },
      py::arg("eps"), py::arg("p") = 2.0);
  m.def("disk_density", &disk_density, py::arg("cell_width"), py::arg("n"),
        py::arg("mass"));
}
