#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>

#include "gprbtd/cli.hpp"
#include "gprbtd/config.hpp"
#include "gprbtd/evaluate.hpp"
#include "gprbtd/io.hpp"
#include "gprbtd/learn.hpp"
#include "gprbtd/simulate.hpp"

namespace py = pybind11;
using namespace gprbtd;

namespace {

using FArray = py::array_t<double, py::array::f_style>;

// Samples keep their (t, x, y) order with t fastest, so the array is
// Fortran-ordered with shape (nt, nx, ny).
py::dict lane_dict(const LaneDataset& lane) {
  const auto& v = lane.volume;
  FArray samples({v.nt(), v.nx(), v.ny()});
  const auto src = v.samples().data();
  std::memcpy(samples.mutable_data(), src.data(), src.size() * sizeof(double));
  py::list truth;
  for (const auto& g : lane.truth)
    truth.append(py::dict(py::arg("x_m") = g.x_m, py::arg("y_m") = g.y_m,
                          py::arg("depth") = std::string(to_string(g.depth_category)),
                          py::arg("metal") = std::string(to_string(g.metal))));
  py::dict d;
  d["lane_id"] = lane.lane_id;
  d["samples"] = samples;
  d["dt"] = v.dt();
  d["dx"] = v.dx();
  d["dy"] = v.dy();
  d["area_m2"] = lane.area_m2;
  d["truth"] = truth;
  return d;
}

py::array_t<double> roc_array(py::array_t<double> statistic, py::array_t<int> threat, int n_threats, double area) {
  auto s = statistic.unchecked<1>();
  auto h = threat.unchecked<1>();
  if (s.shape(0) != h.shape(0)) throw std::invalid_argument("statistic and threat lengths differ");
  std::vector<LabeledAlarm> alarms;
  for (py::ssize_t i = 0; i < s.shape(0); ++i) {
    const int t = h(i);
    if (t >= n_threats) throw std::invalid_argument("threat index out of range");
    alarms.push_back({Alarm{"", 0, 0, s(i)}, t >= 0, t});
  }
  const auto c = roc(alarms, n_threats, area);
  py::array_t<double> out({static_cast<py::ssize_t>(c.points.size()), py::ssize_t{2}});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    o(i, 0) = c.points[i].far_per_m2;
    o(i, 1) = c.points[i].pd;
  }
  return out;
}

double auc_array(py::array_t<double> curve, double lo, double hi) {
  auto c = curve.unchecked<2>();
  if (c.shape(1) != 2) throw std::invalid_argument("curve must have two columns");
  RocCurve r;
  for (py::ssize_t i = 0; i < c.shape(0); ++i) r.points.push_back({c(i, 0), c(i, 1)});
  return auc(r, lo, hi);
}

}  // namespace

PYBIND11_MODULE(_gprbtd, m) {
  m.attr("__version__") = GPRBTD_VERSION;
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"gprbtd"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int rc;
        {
          py::gil_scoped_release nogil;
          rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"), "Run one CLI command; returns (exit code, stdout, stderr).");

  m.def(
      "simulate_lane", [](const std::string& spec_text, int index) {
        return lane_dict(synth_lane(parse_sim_spec(spec_text), index).lane);
      },
      py::arg("spec") = "", py::arg("index") = 0, "Render one synthetic lane from sim spec text.");
  m.def(
      "read_lane", [](const std::string& header) { return lane_dict(read_lane(header)); }, py::arg("header"));

  m.def(
      "config_dump", [](const std::string& text) { return dump_config(parse_config(text)); }, py::arg("text") = "",
      "Effective configuration after applying key = value text to the defaults.");
  m.def("config_keys", &config_keys);

  m.def("roc", &roc_array, py::arg("statistic"), py::arg("threat"), py::arg("n_threats"), py::arg("area_m2"),
        "ROC points (far_per_m2, pd); threat[i] is the matched threat index or -1.");
  m.def("auc", &auc_array, py::arg("curve"), py::arg("far_lo"), py::arg("far_hi"));
  m.def(
      "platt", [](double a, double b, double s) { return platt_apply(PlattParams{a, b}, s); }, py::arg("a"),
      py::arg("b"), py::arg("s"));
}
