#include "phdyn/cocycles.hpp"
#include "phdyn/cones.hpp"
#include "phdyn/horseshoe.hpp"
#include "phdyn/linear_models.hpp"
#include "phdyn/maps/map_spec.hpp"
#include "phdyn/rotation.hpp"
#include "phdyn/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace phdyn;
using json = nlohmann::json;

namespace {

py::dict spectrum(const std::vector<std::vector<long long>>& rows) {
  const linear::IntegerMatrix m(rows);
  const auto s = linear::spectral_classify(m);
  py::dict d;
  d["char_poly"] = s.char_poly;
  d["eigenvalues"] = s.eigenvalues;
  d["moduli"] = s.moduli;
  d["classification"] = linear::to_string(s.classification);
  d["irreducible_over_rationals"] = s.irreducible_over_rationals;
  return d;
}

std::vector<double> finite_time_exponents(const std::string& map_json, const Eigen::VectorXd& x, int n, int warmup) {
  const auto map = maps::make_map(json::parse(map_json));
  if (x.size() != map->dim()) throw InputError("start point has the wrong dimension");
  return cones::finite_time_exponents(*map, Vec(x), n, warmup).exponents;
}

py::dict equalize(const std::vector<Eigen::MatrixXd>& mats, double step_cap) {
  const auto p = cocycles::equalize_2d(cocycles::PeriodicCocycle(mats), step_cap);
  py::dict d;
  d["theta_star"] = p.theta_star;
  d["thetas"] = p.thetas;
  d["diameter"] = p.diameter;
  d["endpoint_moduli"] = p.endpoint_moduli;
  d["sink_preserved"] = p.sink_preserved;
  return d;
}

py::dict steer(const std::vector<Eigen::MatrixXd>& mats, const Eigen::Vector2d& v, const Eigen::Vector2d& w,
               double eps) {
  const auto r = cocycles::steer_vector(mats, v, w, eps);
  py::dict d;
  d["success"] = r.success;
  d["angles"] = r.angles;
  d["residual"] = r.residual;
  d["growth_hypothesis"] = r.growth_hypothesis;
  return d;
}

py::dict nonresonance(const Eigen::VectorXd& v, int Q, double tol) {
  if (v.size() < 1 || v.size() > kMaxDim) throw InputError("nonresonance needs 1..3 components");
  const auto r = rotation::nonresonance_check(Vec(v), Q, tol);
  py::dict d;
  d["pass"] = r.pass;
  d["relation"] = r.relation;
  d["residual"] = r.residual;
  return d;
}

py::dict periodic_point(const std::vector<int>& word) {
  const auto p = horseshoe::periodic_point(maps::HorseshoeSpec{}, word);
  py::list fiber;
  for (const auto& f : p.fiber) {
    py::dict e;
    e["t"] = f.t;
    e["multiplier"] = f.multiplier;
    e["stable_dimension"] = f.stable_dimension;
    fiber.append(e);
  }
  py::dict d;
  d["base"] = std::vector<double>{p.base(0), p.base(1)};
  d["fiber"] = fiber;
  return d;
}

py::dict run_analysis(const std::string& config_json, int workers) {
  json config = json::parse(config_json, nullptr, false);
  if (config.is_discarded()) throw InputError("malformed JSON config");
  std::vector<std::pair<std::string, std::string>> arts;
  {
    py::gil_scoped_release release;
    arts = runner::run_analysis(config, workers);
  }
  py::dict d;
  for (const auto& [name, data] : arts) d[py::str(name)] = py::str(data);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "phdyn native core";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);

  m.def("spectrum", &spectrum, py::arg("matrix"));
  m.def("finite_time_exponents", &finite_time_exponents, py::arg("map_json"), py::arg("x"), py::arg("n"),
        py::arg("warmup") = 32);
  m.def(
      "cocycle_exponents",
      [](const std::vector<Eigen::MatrixXd>& mats) { return cocycles::exponents(cocycles::PeriodicCocycle(mats)).sigma; },
      py::arg("matrices"));
  m.def("equalize_2d", &equalize, py::arg("matrices"), py::arg("step_cap"));
  m.def("steer_vector", &steer, py::arg("matrices"), py::arg("v"), py::arg("w"), py::arg("eps"));
  m.def("nonresonance", &nonresonance, py::arg("v"), py::arg("Q"), py::arg("tol"));
  m.def("horseshoe_periodic_point", &periodic_point, py::arg("word"));
  m.def("run_analysis", &run_analysis, py::arg("config_json"), py::arg("workers") = 1);
}
