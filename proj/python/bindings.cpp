#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <array>
#include <sstream>

#include "cpd/diagnostics.hpp"
#include "cpd/errors.hpp"
#include "cpd/fields.hpp"
#include "cpd/harness.hpp"
#include "cpd/integrators.hpp"
#include "cpd/smallmat.hpp"

namespace py = pybind11;

namespace {

using Arr3 = std::array<double, 3>;
using Arr33 = std::array<Arr3, 3>;

cpd::Vec3 vec(const Arr3& a) { return {a[0], a[1], a[2]}; }
Arr3 arr(const cpd::Vec3& v) { return v.e; }

Arr33 arr(const cpd::Mat3& m) {
  Arr33 out{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out[i][j] = m(i, j);
  return out;
}

cpd::Mat3 mat(const Arr33& a) {
  cpd::Mat3 m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = a[i][j];
  return m;
}

cpd::SkewAngle skew(const Arr3& axis, double angle) { return {vec(axis), angle}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Splitting integrators for charged-particle dynamics in strong magnetic fields.";

  static py::exception<cpd::Error> base(m, "CpdError");
  py::register_exception<cpd::ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<cpd::SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<cpd::BlowUpError>(m, "BlowUpError", base.ptr());
  py::register_exception<cpd::MaxStepsError>(m, "MaxStepsError", base.ptr());

  // smallmat
  m.def("hat", [](const Arr3& b) { return arr(cpd::hat(vec(b))); }, py::arg("b"));
  m.def(
      "decompose",
      [](const Arr3& b, double t) {
        const auto s = cpd::decompose(vec(b), t);
        return py::make_tuple(arr(s.axis), s.angle);
      },
      py::arg("b"), py::arg("t"), "Returns (axis, angle) with angle*hat(axis) == t*hat(b).");
  m.def(
      "rodrigues_exp",
      [](const Arr3& axis, double angle) { return arr(cpd::rodrigues_exp(skew(axis, angle))); },
      py::arg("axis"), py::arg("angle"));
  m.def(
      "rodrigues_phi1",
      [](const Arr3& axis, double angle) { return arr(cpd::rodrigues_phi1(skew(axis, angle))); },
      py::arg("axis"), py::arg("angle"));
  m.def("series_exp_oracle", [](const Arr33& a) { return arr(cpd::series_exp_oracle(mat(a))); });
  m.def("series_phi1_oracle",
        [](const Arr33& a) { return arr(cpd::series_phi1_oracle(mat(a))); });

  // fields
  m.def("problem_names", &cpd::problem_names);
  m.def(
      "problem_info",
      [](const std::string& name) {
        const auto& p = cpd::find_problem(name);
        py::dict d;
        d["name"] = p.name;
        d["q"] = p.q;
        d["x0"] = arr(p.x0);
        d["v0"] = arr(p.v0);
        d["t_end"] = p.t_end;
        d["uniform_field"] = p.magnetic.uniform;
        return d;
      },
      py::arg("problem"));
  m.def(
      "scaled_B",
      [](const std::string& name, double eps, const Arr3& x) {
        return arr(cpd::scaled_B(cpd::find_problem(name), eps, vec(x)));
      },
      py::arg("problem"), py::arg("eps"), py::arg("x"));
  m.def(
      "e_field",
      [](const std::string& name, const Arr3& x) {
        return arr(cpd::e_field(cpd::find_problem(name), vec(x)));
      },
      py::arg("problem"), py::arg("x"));

  // integrators
  py::enum_<cpd::Method>(m, "Method")
      .value("s2new", cpd::Method::s2new)
      .value("s2vp", cpd::Method::s2vp);

  py::class_<cpd::ParticleState>(m, "ParticleState")
      .def(py::init([](const Arr3& x, const Arr3& v, double t) {
             return cpd::ParticleState{vec(x), vec(v), t};
           }),
           py::arg("x"), py::arg("v"), py::arg("t") = 0.0)
      .def_property(
          "x", [](const cpd::ParticleState& s) { return arr(s.x); },
          [](cpd::ParticleState& s, const Arr3& x) { s.x = vec(x); })
      .def_property(
          "v", [](const cpd::ParticleState& s) { return arr(s.v); },
          [](cpd::ParticleState& s, const Arr3& v) { s.v = vec(v); })
      .def_readwrite("t", &cpd::ParticleState::t)
      .def("__eq__", [](const cpd::ParticleState& a, const cpd::ParticleState& b) { return a == b; })
      .def("__repr__", [](const cpd::ParticleState& s) {
        std::ostringstream os;
        os << "ParticleState(x=(" << s.x[0] << ", " << s.x[1] << ", " << s.x[2] << "), v=("
           << s.v[0] << ", " << s.v[1] << ", " << s.v[2] << "), t=" << s.t << ")";
        return os.str();
      });

  py::class_<cpd::SchemeContext>(m, "SchemeContext")
      .def(py::init([](const std::string& name, double eps, double h) {
             return cpd::SchemeContext(cpd::find_problem(name), eps, h);
           }),
           py::arg("problem"), py::arg("eps"), py::arg("h"))
      .def_property_readonly("eps", &cpd::SchemeContext::eps)
      .def_property_readonly("h", &cpd::SchemeContext::h)
      .def_property_readonly("b0", [](const cpd::SchemeContext& c) { return arr(c.b0()); })
      .def("initial_state", [](const cpd::SchemeContext& c) {
        return cpd::ParticleState{c.problem().x0, c.problem().v0, 0.0};
      })
      .def("with_step", &cpd::SchemeContext::with_step, py::arg("h"))
      .def("subflow_S", &cpd::subflow_S, py::arg("state"), py::arg("dt"))
      .def("subflow_T", &cpd::subflow_T, py::arg("state"), py::arg("dt"))
      .def("step_s2_new", &cpd::step_s2_new, py::arg("state"))
      .def("step_s2_vp", &cpd::step_s2_vp, py::arg("state"))
      .def("step_s2_new_rescaled", &cpd::step_s2_new_rescaled, py::arg("state"),
           py::arg("frak_h"))
      .def("step", [](const cpd::SchemeContext& c, cpd::Method meth,
                      const cpd::ParticleState& s) { return cpd::step(c, meth, s); });

  m.def("integrate", &cpd::integrate, py::arg("ctx"), py::arg("method"), py::arg("n_steps"),
        py::arg("record_every") = 1);
  m.def("integrate_until", &cpd::integrate_until, py::arg("ctx"), py::arg("method"),
        py::arg("t_end"), py::arg("record_every") = 1);
  m.def(
      "reference_solve",
      [](const std::string& name, double eps, double t_end, double rtol, double atol,
         std::int64_t max_steps) {
        cpd::RefSolverConfig cfg;
        cfg.rtol = rtol;
        cfg.atol = atol;
        cfg.max_steps = max_steps;
        py::gil_scoped_release release;
        return cpd::reference_solve(cpd::find_problem(name), eps, t_end, cfg);
      },
      py::arg("problem"), py::arg("eps"), py::arg("t_end"), py::arg("rtol") = 1e-12,
      py::arg("atol") = 1e-12, py::arg("max_steps") = 50'000'000);
  m.def(
      "rk4_oracle",
      [](const std::string& name, double eps, double t_end, double h) {
        py::gil_scoped_release release;
        return cpd::rk4_oracle(cpd::find_problem(name), eps, t_end, h);
      },
      py::arg("problem"), py::arg("eps"), py::arg("t_end"), py::arg("h"));

  // diagnostics
  m.def(
      "hamiltonian",
      [](const std::string& name, const cpd::ParticleState& s) {
        return cpd::hamiltonian(cpd::find_problem(name), s);
      },
      py::arg("problem"), py::arg("state"));
  m.def(
      "v_parallel",
      [](const std::string& name, double eps, const cpd::ParticleState& s) {
        return arr(cpd::v_parallel(cpd::find_problem(name), eps, s));
      },
      py::arg("problem"), py::arg("eps"), py::arg("state"));
  m.def(
      "error_report",
      [](const std::string& name, double eps, const cpd::ParticleState& num,
         const cpd::ParticleState& ref) {
        const auto r = cpd::error_report(cpd::find_problem(name), eps, num, ref);
        py::dict d;
        d["errx"] = r.errx;
        d["errv_par"] = r.errv_par;
        d["errv_perp"] = r.errv_perp;
        d["error"] = r.error;
        return d;
      },
      py::arg("problem"), py::arg("eps"), py::arg("numerical"), py::arg("reference"));
  m.def(
      "loglog_slope",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const auto f = cpd::loglog_slope(xs, ys);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["r2"] = f.r2;
        return d;
      },
      py::arg("xs"), py::arg("ys"));

  // harness
  py::class_<cpd::SweepResult>(m, "SweepResult")
      .def_readonly("problem", &cpd::SweepResult::problem)
      .def_readonly("method", &cpd::SweepResult::method)
      .def_readonly("eps", &cpd::SweepResult::eps)
      .def_readonly("h", &cpd::SweepResult::h)
      .def_readonly("errx", &cpd::SweepResult::errx)
      .def_readonly("errv_par", &cpd::SweepResult::errv_par)
      .def_readonly("errv_perp", &cpd::SweepResult::errv_perp)
      .def_readonly("error", &cpd::SweepResult::error)
      .def_readonly("e_H_final", &cpd::SweepResult::e_H_final)
      .def_readonly("wall_time_ms", &cpd::SweepResult::wall_time_ms)
      .def_readonly("ok", &cpd::SweepResult::ok)
      .def_readonly("reason", &cpd::SweepResult::reason);

  m.def(
      "run_sweep",
      [](const std::string& problem, const std::vector<cpd::Method>& methods,
         const std::vector<double>& eps_list, const std::vector<double>& h_list, double t_end,
         double rtol, double atol, int jobs) {
        cpd::SweepConfig cfg;
        cfg.problem = problem;
        cfg.methods = methods;
        cfg.eps_list = eps_list;
        cfg.h_list = h_list;
        cfg.t_end = t_end;
        cfg.ref_cfg.rtol = rtol;
        cfg.ref_cfg.atol = atol;
        cfg.jobs = jobs;
        py::gil_scoped_release release;
        return cpd::run_sweep(cfg);
      },
      py::arg("problem"), py::arg("methods"), py::arg("eps_list"), py::arg("h_list"),
      py::arg("t_end") = 1.0, py::arg("rtol") = 1e-12, py::arg("atol") = 1e-12,
      py::arg("jobs") = 1);
  m.def(
      "write_csv",
      [](const std::vector<cpd::SweepResult>& rows, const std::filesystem::path& path,
         bool include_timing) { cpd::write_csv(rows, path, {include_timing}); },
      py::arg("rows"), py::arg("path"), py::arg("include_timing") = false);
  m.def(
      "energy_study",
      [](const std::string& problem, cpd::Method method, double eps, double h, double t_end,
         std::int64_t record_every) {
        cpd::EnergySeries s;
        {
          py::gil_scoped_release release;
          s = cpd::energy_study(problem, method, eps, h, t_end, record_every);
        }
        return py::make_tuple(s.times, s.e_H);
      },
      py::arg("problem"), py::arg("method"), py::arg("eps"), py::arg("h"),
      py::arg("t_end") = 100.0, py::arg("record_every") = 1);
  m.def("dyadic_range", &cpd::dyadic_range, py::arg("from"), py::arg("to"));
}
