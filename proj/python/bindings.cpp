#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "resetsim/cli.hpp"
#include "resetsim/device.hpp"
#include "resetsim/errors.hpp"
#include "resetsim/io.hpp"
#include "resetsim/measurement.hpp"
#include "resetsim/open_system.hpp"
#include "resetsim/reset_protocols.hpp"
#include "resetsim/units.hpp"

namespace py = pybind11;
using namespace resetsim;

namespace {

dynamics::SystemParams params_from(const py::kwargs& kw, int levels) {
  auto p = dynamics::SystemParams::device_defaults();
  p.qubit_levels = levels;
  for (const auto& [key, value] : kw) {
    const auto k = key.cast<std::string>();
    if (k == "coupling_hz") p.coupling_rad_s = angular(value.cast<double>());
    else if (k == "kappa_hz") p.dissipator_kappa_rad_s = angular(value.cast<double>());
    else if (k == "dissipator_freq_hz") p.dissipator_freq_rad_s = angular(value.cast<double>());
    else if (k == "qubit_max_freq_hz") p.qubit_max_freq_rad_s = angular(value.cast<double>());
    else if (k == "anharmonicity_hz") p.anharmonicity_rad_s = angular(value.cast<double>());
    else if (k == "t1_s") p.qubit_t1_s = value.cast<double>();
    else if (k == "bath_temperature_k") p.bath_temperature_k = value.cast<double>();
    else if (k == "fock_cutoff") p.fock_cutoff = value.cast<int>();
    else throw py::type_error("unknown system parameter '" + k + "'");
  }
  p.validate();
  return p;
}

py::dict result_dict(const protocols::ResetResult& r) {
  py::dict d;
  d["protocol"] = r.protocol;
  d["prepared"] = r.prepared;
  d["before"] = r.before;
  d["after"] = r.after;
  d["assigned_before"] = r.assigned_before.p;
  d["assigned_after"] = r.assigned_after.p;
  d["residual"] = r.residual;
  d["residual_true"] = r.residual_true;
  d["steady_state"] = r.steady_state;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dissipator-based qubit reset simulations";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<SingularNetworkError>(m, "SingularNetworkError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<ZeroLossError>(m, "ZeroLossError", base.ptr());
  py::register_exception<NonThermalError>(m, "NonThermalError", base.ptr());
  py::register_exception<StepSizeError>(m, "StepSizeError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def(
      "purcell_decay_rate",
      [](double kappa_hz, double coupling_hz, double detuning_hz) {
        return ordinary(dynamics::purcell_decay_rate(angular(kappa_hz), angular(coupling_hz), angular(detuning_hz)));
      },
      py::arg("kappa_hz"), py::arg("coupling_hz"), py::arg("detuning_hz") = 0.0,
      "Qubit decay rate through the lossy mode, in Hz (rate / 2pi).");

  m.def(
      "thermal_population",
      [](double freq_hz, double temperature_k) {
        return measurement::thermal_population(angular(freq_hz), temperature_k);
      },
      py::arg("freq_hz"), py::arg("temperature_k"));
  m.def(
      "effective_temperature",
      [](double freq_hz, double p_excited) { return measurement::effective_temperature(angular(freq_hz), p_excited); },
      py::arg("freq_hz"), py::arg("p_excited"));

  m.def("parse_quantity", &io::parse_quantity, py::arg("text"), py::arg("unit"));

  m.def(
      "dissipator_s21",
      [](const std::vector<double>& freqs_hz) {
        const auto sweep = rf::sweep_s_params(Device::design_defaults().dissipator_chain(), freqs_hz);
        std::vector<rf::Complex> s21;
        for (const auto& p : sweep) s21.push_back(p.s21);
        return s21;
      },
      py::arg("freqs_hz"), "S21 of the default low-pass / line / low-pass chain.");

  m.def(
      "diplexer_isolation_db",
      [](double lo_hz, double hi_hz) {
        return rf::diplexer_isolation(Device::design_defaults().diplexer(), lo_hz, hi_hz).worst_db;
      },
      py::arg("lo_hz") = 1e9, py::arg("hi_hz") = 10e9);

  m.def(
      "fringe_linecut",
      [](const std::vector<double>& plateau_s, double rise_s, const py::kwargs& kw) {
        const auto fit = protocols::fringe_linecut(params_from(kw, 2), plateau_s, rise_s);
        py::dict d;
        d["plateau_s"] = fit.plateau_s;
        d["population"] = fit.population;
        d["envelope_s"] = fit.envelope_s;
        d["first_minimum_s"] = fit.first_minimum_s;
        d["oscillatory"] = fit.oscillatory;
        d["fit_ok"] = fit.fit_ok;
        d["warning"] = fit.warning;
        return d;
      },
      py::arg("plateau_s"), py::arg("rise_s") = 2e-9,
      "Resonant line-cut from |e>; keyword system parameters override the device defaults.");

  m.def(
      "benchmark",
      [](const std::string& protocol, std::uint64_t seed, std::size_t shots, const py::kwargs& kw) {
        const auto p = params_from(kw, 3);
        protocols::BenchmarkOptions o;
        o.readout.seed = seed;
        o.readout.shots = shots;
        if (protocol == "eg") return result_dict(protocols::benchmark_eg_reset(p, o));
        if (protocol == "fe") return result_dict(protocols::benchmark_fe_reset(p, o));
        if (protocol == "concatenated") return result_dict(protocols::concatenated_reset(p, o));
        throw UsageError("protocol must be eg, fe or concatenated");
      },
      py::arg("protocol") = "eg", py::arg("seed") = 20240601, py::arg("shots") = 100000,
      "Reset benchmark with the default preparation and readout models.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
