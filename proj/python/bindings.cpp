#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "islesim/scenario.hpp"

namespace py = pybind11;
using namespace islesim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Islanded-feeder PV stability simulator core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<OracleError>(m, "OracleError", PyExc_RuntimeError);

  py::class_<ModuleParams>(m, "ModuleParams")
      .def(py::init<>())
      .def_readwrite("p_stc_pu", &ModuleParams::p_stc_pu)
      .def_readwrite("gamma_per_k", &ModuleParams::gamma_per_k);

  py::class_<OperatingEnv>(m, "OperatingEnv")
      .def(py::init<double, double>(), py::arg("irradiance_w_m2"),
           py::arg("cell_temp_c"))
      .def_readwrite("irradiance_w_m2", &OperatingEnv::irradiance_w_m2)
      .def_readwrite("cell_temp_c", &OperatingEnv::cell_temp_c);

  m.def("mpp_power", &mpp_power, py::arg("module"), py::arg("env"),
        "Available PV power for the given irradiance and cell temperature");

  py::class_<SwingParams>(m, "SwingParams")
      .def(py::init<>())
      .def_readwrite("h_s", &SwingParams::h_s)
      .def_readwrite("d_pu", &SwingParams::d_pu)
      .def_readwrite("f_n_hz", &SwingParams::f_n_hz)
      .def_readwrite("s_sys_pu", &SwingParams::s_sys_pu);

  py::class_<SwingState>(m, "SwingState")
      .def(py::init<>())
      .def_readwrite("delta_f_hz", &SwingState::delta_f_hz)
      .def_readwrite("delta_rad", &SwingState::delta_rad)
      .def_readwrite("p_mech_pu", &SwingState::p_mech_pu);

  m.def("swing_step", &swing_step, py::arg("state"), py::arg("params"),
        py::arg("p_elec_pu"), py::arg("dt_s"),
        "One Heun step of the aggregate-machine swing equation");

  py::class_<EventSchedule>(m, "EventSchedule")
      .def(py::init<>())
      .def_readwrite("dip_start_s", &EventSchedule::dip_start_s)
      .def_readwrite("dip_clear_s", &EventSchedule::dip_clear_s)
      .def_readwrite("dip_residual_pu", &EventSchedule::dip_residual_pu);

  py::class_<RelaySettings>(m, "RelaySettings")
      .def(py::init<>())
      .def_readwrite("threshold_hz_per_s", &RelaySettings::threshold_hz_per_s)
      .def_readwrite("duration_s", &RelaySettings::duration_s);

  py::class_<InverterParams>(m, "InverterParams")
      .def(py::init<>())
      .def_readwrite("s_rated_pu", &InverterParams::s_rated_pu)
      .def_readwrite("i_max", &InverterParams::i_max)
      .def_readwrite("v_enter_pu", &InverterParams::v_enter_pu)
      .def_readwrite("v_exit_pu", &InverterParams::v_exit_pu)
      .def_readwrite("exit_hold_s", &InverterParams::exit_hold_s)
      .def_readwrite("k_q", &InverterParams::k_q)
      .def_readwrite("p_ramp_pu_per_s", &InverterParams::p_ramp_pu_per_s);

  py::class_<BusTrace>(m, "BusTrace")
      .def_readonly("v_pu", &BusTrace::v_pu)
      .def_readonly("f_hz", &BusTrace::f_hz)
      .def_readonly("rocof_hz_per_s", &BusTrace::rocof_hz_per_s);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("t_s", &RunResult::t_s)
      .def_property_readonly("start", [](const RunResult& r) { return r.bus[0]; })
      .def_property_readonly("middle", [](const RunResult& r) { return r.bus[1]; })
      .def_property_readonly("end", [](const RunResult& r) { return r.bus[2]; })
      .def_readonly("pv_p_pu", &RunResult::pv_p_pu)
      .def_readonly("pv_q_pu", &RunResult::pv_q_pu)
      .def_readonly("pv_mode", &RunResult::pv_mode)
      .def_readonly("relay_tripped", &RunResult::relay_tripped)
      .def_readonly("relay_trip_time_s", &RunResult::relay_trip_time_s)
      .def_readonly("scenario_digest", &RunResult::scenario_digest)
      .def_readonly("valid", &RunResult::valid)
      .def("step_count", &RunResult::step_count);

  py::class_<MetricsSummary>(m, "MetricsSummary")
      .def_readonly("max_abs_rocof_hz_per_s", &MetricsSummary::max_abs_rocof_hz_per_s)
      .def_readonly("relay_tripped", &MetricsSummary::relay_tripped)
      .def_readonly("trip_time_s", &MetricsSummary::trip_time_s)
      .def_readonly("voltage_nadir_pu", &MetricsSummary::voltage_nadir_pu)
      .def_readonly("recovery_time_s", &MetricsSummary::recovery_time_s);

  py::class_<ScenarioSpec> spec(m, "ScenarioSpec");
  spec.def(py::init<>())
      .def_readwrite("feeder_file", &ScenarioSpec::feeder_file)
      .def_readwrite("dt_s", &ScenarioSpec::dt_s)
      .def_readwrite("duration_s", &ScenarioSpec::duration_s)
      .def_readwrite("event", &ScenarioSpec::event)
      .def_readwrite("pv_generation_fraction", &ScenarioSpec::pv_generation_fraction)
      .def_readwrite("load_scale", &ScenarioSpec::load_scale)
      .def_readwrite("line_length_factor", &ScenarioSpec::line_length_factor)
      .def_readwrite("relay", &ScenarioSpec::relay)
      .def_readwrite("inverter", &ScenarioSpec::inverter)
      .def_readwrite("pv_module", &ScenarioSpec::pv_module)
      .def_readwrite("cell_temp_c", &ScenarioSpec::cell_temp_c)
      .def_readwrite("swing", &ScenarioSpec::swing)
      .def_readwrite("rocof_window_s", &ScenarioSpec::rocof_window_s)
      .def("step_count", &ScenarioSpec::step_count);

  m.def("default_scenario", &default_scenario,
        "Case Study 1 at 100% PV on the built-in synthetic feeder");
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("scenario_echo_json", &scenario_echo_json, py::arg("spec"));
  m.def("scenario_digest", &scenario_digest, py::arg("spec"));
  m.def("run_scenario", &run_scenario, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>(),
        "Run one scenario in-process and return the recorded traces");
  m.def("compute_metrics", &compute_metrics, py::arg("result"),
        py::arg("relay_settings"));
  m.def("write_outputs", &write_outputs, py::arg("result"), py::arg("metrics"),
        py::arg("spec"), py::arg("dir"));
  m.def(
      "run_sweep",
      [](const ScenarioSpec& base, const std::string& param,
         const std::vector<double>& values) {
        SweepSpec sw{base, param, values};
        std::vector<SweepEntry> entries;
        {
          py::gil_scoped_release release;
          entries = run_sweep(sw);
        }
        py::list out;
        for (const auto& e : entries) {
          py::dict d;
          d["value"] = e.value;
          d["ok"] = e.ok;
          if (e.ok) {
            d["result"] = py::cast(e.result);
            d["metrics"] = py::cast(e.metrics);
          } else {
            d["error"] = e.error;
          }
          out.append(d);
        }
        return out;
      },
      py::arg("base"), py::arg("param"), py::arg("values"),
      "Run one scenario per value; failures are reported per entry");

  m.attr("__version__") = "0.1.0";
}
