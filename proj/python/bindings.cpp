#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "critlab/adaptation.hpp"
#include "critlab/averaging.hpp"
#include "critlab/cli.hpp"
#include "critlab/integrator.hpp"
#include "critlab/oscillator.hpp"
#include "critlab/sweep.hpp"

namespace py = pybind11;
using namespace critlab;

namespace {

py::dict to_dict(const Trajectory& traj) {
  py::dict d;
  auto arr = [](std::span<const double> s) { return py::array_t<double>(static_cast<py::ssize_t>(s.size()), s.data()); };
  d["t"] = arr(traj.times());
  for (std::size_t c = 0; c < traj.dim(); ++c) d[py::str(traj.columns()[c])] = arr(traj.column(c));
  return d;
}

}  // namespace

PYBIND11_MODULE(_critlab, m) {
  m.doc() = "Self-tuning integrator and oscillator simulations";

  py::register_exception<Error>(m, "CritlabError", PyExc_RuntimeError);

  py::class_<Interval>(m, "Interval")
      .def(py::init([](double lo, double hi, bool lo_open) { return Interval{lo, hi, lo_open}; }), py::arg("lo"),
           py::arg("hi"), py::arg("lo_open") = false)
      .def_readwrite("lo", &Interval::lo)
      .def_readwrite("hi", &Interval::hi)
      .def_readwrite("lo_open", &Interval::lo_open)
      .def("__contains__", &Interval::contains)
      .def("__repr__", &Interval::to_string);

  py::class_<AffineLawParams>(m, "AffineLawParams")
      .def(py::init([](double a, double b, double c, double eps) { return AffineLawParams{a, b, c, eps}; }),
           py::arg("a") = 1.0, py::arg("b") = 0.01, py::arg("c") = 42.0, py::arg("eps") = 0.01)
      .def_readwrite("a", &AffineLawParams::a)
      .def_readwrite("b", &AffineLawParams::b)
      .def_readwrite("c", &AffineLawParams::c)
      .def_readwrite("eps", &AffineLawParams::eps);

  py::class_<AdaptationLaw>(m, "AdaptationLaw")
      .def_static("affine", &AdaptationLaw::affine, py::arg("params"), py::arg("domain_x") = kDefaultRateDomain,
                  py::arg("domain_mu") = kDefaultGainDomain)
      .def_static(
          "lorentzian",
          [](double height, double width, double slope, double offset, Interval dx, Interval dm) {
            return AdaptationLaw::lorentzian(LorentzianLawParams{height, width, slope, offset}, dx, dm);
          },
          py::arg("height") = 1.0, py::arg("width") = 1.0, py::arg("slope") = 1.0, py::arg("offset") = 0.5,
          py::arg("domain_x") = Interval{0.0, 100.0, false}, py::arg("domain_mu") = Interval{-10.0, 10.0, false})
      .def_static("table", &AdaptationLaw::table, py::arg("f_points"), py::arg("g_points"))
      .def_static("frozen", &AdaptationLaw::frozen, py::arg("domain_x") = kDefaultRateDomain,
                  py::arg("domain_mu") = kDefaultGainDomain)
      .def("f", &AdaptationLaw::f)
      .def("g", &AdaptationLaw::g)
      .def("rate", &AdaptationLaw::rate)
      .def_property_readonly("description", &AdaptationLaw::description)
      .def_property_readonly("domain_x", &AdaptationLaw::domain_x)
      .def_property_readonly("domain_mu", &AdaptationLaw::domain_mu);

  m.def("fixed_point", [](const AdaptationLaw& law, double mu0) { return fixed_point(law, mu0).x_star; },
        py::arg("law"), py::arg("mu0"), "Rate x* with f(x*) = g(mu0).");

  m.def(
      "simulate_driven",
      [](const AdaptationLaw& law, double mu0, double x_init, double mu_init, std::vector<double> levels,
         double period, double t_end, double dt, std::size_t stride) {
        const TimeGrid grid = TimeGrid::make(0.0, t_end, dt > 0.0 ? dt : default_step(mu0));
        const SaccadeSchedule sched{period, std::move(levels), 0.0};
        py::gil_scoped_release release;
        auto traj = simulate_driven(IntegratorParams{mu0, x_init, mu_init}, law, sched, grid,
                                    SimulationOptions{stride, {}});
        py::gil_scoped_acquire acquire;
        return to_dict(traj);
      },
      py::arg("law"), py::arg("mu0"), py::arg("x_init"), py::arg("mu_init"),
      py::arg("levels") = std::vector<double>{20.0, 60.0}, py::arg("period") = 1.0, py::arg("t_end") = 10.0,
      py::arg("dt") = 0.0, py::arg("record_stride") = 1);

  m.def(
      "simulate_autonomous",
      [](const AdaptationLaw& law, double mu0, double x_init, double mu_init, double t_end, double dt,
         std::size_t stride) {
        const TimeGrid grid = TimeGrid::make(0.0, t_end, dt > 0.0 ? dt : default_step(mu0));
        const auto traj = simulate_autonomous(IntegratorParams{mu0, x_init, mu_init}, law, grid,
                                              SimulationOptions{stride, {}});
        py::dict d = to_dict(traj);
        if (!law.is_frozen()) d["energy_check"] = check_energy_decrease(traj, law, mu0).passed;
        return d;
      },
      py::arg("law"), py::arg("mu0"), py::arg("x_init"), py::arg("mu_init"), py::arg("t_end") = 10.0,
      py::arg("dt") = 0.0, py::arg("record_stride") = 1);

  m.def(
      "simulate_oscillator",
      [](const AdaptationLaw& law, double mu0, double lam, double omega, double x_init, double mu_init, double t_end,
         double dt, std::size_t stride) {
        OscillatorParams p;
        p.mu0 = mu0;
        p.lambda = lam;
        p.omega = omega;
        p.x_init = x_init;
        p.mu_init = mu_init;
        return to_dict(simulate_oscillator(p, law, TimeGrid::make(0.0, t_end, dt), stride));
      },
      py::arg("law"), py::arg("mu0") = 1.0, py::arg("lam") = 1.0, py::arg("omega") = 1.0, py::arg("x_init") = 0.1,
      py::arg("mu_init") = 0.2, py::arg("t_end") = 100.0, py::arg("dt") = 0.01, py::arg("record_stride") = 1);

  m.def(
      "balance_prediction",
      [](const AdaptationLaw& law, double mu0, double lam, double omega) {
        OscillatorParams p;
        p.mu0 = mu0;
        p.lambda = lam;
        p.omega = omega;
        const auto b = harmonic_balance_prediction(p, law);
        return py::make_tuple(b.r_infinity, b.mu_infinity);
      },
      py::arg("law"), py::arg("mu0") = 1.0, py::arg("lam") = 1.0, py::arg("omega") = 1.0,
      "(r, mu) of the first-harmonic equilibrium.");

  m.def("log_uniform_grid", &log_uniform_grid, py::arg("lo"), py::arg("hi"), py::arg("n"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a critlab subcommand; returns (exit_code, stdout, stderr).");
}
