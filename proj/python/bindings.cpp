#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "localdpm/basis.hpp"
#include "localdpm/error.hpp"
#include "localdpm/experiment.hpp"
#include "localdpm/fftsolve.hpp"
#include "localdpm/solve1d.hpp"

namespace py = pybind11;
using namespace localdpm;

namespace {

// Values may be given as Python numbers or strings; both go through the
// same parser as the command line.
ExperimentConfig make_config(const py::dict& settings) {
  ExperimentConfig c;
  auto text = [](py::handle v) { return py::str(v).cast<std::string>(); };
  if (settings.contains("preset")) apply_preset(c, text(settings["preset"]));
  for (const auto& [k, v] : settings) {
    const std::string key = text(k);
    if (key == "preset") continue;
    apply_setting(c, key, py::isinstance<py::bool_>(v) ? (v.cast<bool>() ? "on" : "off") : text(v));
  }
  return c;
}

py::dict to_dict(const SolveReport& r) {
  py::dict d;
  d["shape"] = r.shape;
  d["alpha"] = r.alpha;
  d["scheme"] = r.scheme;
  d["sigma"] = r.sigma;
  d["bc"] = r.bc;
  d["N"] = r.n;
  d["h"] = r.h;
  d["err_max"] = r.err_max;
  d["order"] = r.order;
  d["cond2"] = r.cond2;
  d["condInf"] = r.cond_inf;
  d["cond_order"] = r.cond_order;
  d["gamma_count"] = r.gamma_count;
  d["zeta_count"] = r.zeta_count;
  d["residual"] = r.residual;
  d["seconds"] = r.seconds_total;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Local-basis difference potentials solver";

  static py::exception<DpmError> error(m, "DpmError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DpmError& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("step") = e.step();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("presets", &preset_names);

  m.def(
      "run",
      [](const py::dict& settings) {
        const ExperimentConfig c = make_config(settings);
        ResultTable table;
        {
          py::gil_scoped_release release;
          table = run_experiment(c);
        }
        py::list rows;
        for (const SolveReport& r : table.rows) rows.append(to_dict(r));
        py::dict out;
        out["rows"] = rows;
        out["cond_exponents"] = table.cond_exponents;
        return out;
      },
      py::arg("settings"), "Runs the experiment selected by settings['mode'].");

  m.def(
      "solve",
      [](const py::dict& settings, int n) {
        const ExperimentConfig c = make_config(settings);
        SolveArtifacts art;
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = run_solve(c, n, &art);
        }
        py::dict d = to_dict(r);
        d["density"] = art.density.density;
        std::vector<double> x, y;
        for (int f : art.sets.zeta) {
          const Vec2 p = art.sets.grid.position(art.sets.grid.node(f));
          x.push_back(p.x);
          y.push_back(p.y);
        }
        d["zeta_x"] = x;
        d["zeta_y"] = y;
        return d;
      },
      py::arg("settings"), py::arg("n"),
      "One grid size; adds the density and the zeta node coordinates.");

  m.def(
      "solve_1d",
      [](double a, double b, int n, int order, double sigma, double margin,
         std::function<double(double)> f, std::function<double(double)> exact) {
        Problem1D p;
        p.a = a;
        p.b = b;
        p.n = n;
        p.order = order_from_int(order);
        p.sigma = sigma;
        p.margin = margin;
        p.f = std::move(f);
        p.exact = std::move(exact);
        const Solution1D s = solve_1d(p);
        py::dict d;
        d["h"] = s.h;
        d["gamma_x"] = s.gamma_x;
        d["density"] = s.density;
        d["density_error"] = s.density_error;
        d["solution_error"] = s.solution_error;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("n"), py::arg("order"), py::arg("sigma"),
      py::arg("margin"), py::arg("f"), py::arg("exact"));

  m.def("phi", &phi, py::arg("degree"), py::arg("xi"), py::arg("h"));
  m.def("dphi", &dphi, py::arg("degree"), py::arg("xi"), py::arg("h"));
  m.def("d2phi", &d2phi, py::arg("degree"), py::arg("xi"), py::arg("h"));
  m.def(
      "eigenvalue",
      [](int order, int j, int n) { return eigenvalue(order_from_int(order), j, n); },
      py::arg("order"), py::arg("j"), py::arg("n"));
}
