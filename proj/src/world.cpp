#include "islesim/world.hpp"

#include <algorithm>
#include <cmath>

namespace islesim {

World::World(WorldConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.swing.validate();
  cfg_.events.validate();

  // Steady state before the disturbance: constant-power loads and the PV
  // plant at its available power, then frozen to constant admittance.
  PowerFlowInit init = init_power_flow(
      cfg_.feeder, Complex{cfg_.p_avail_pu, 0.0}, 1.0, Complex{1.0, 0.0});
  load_admittance_ = init.load_admittance;
  last_solution_ = init.solution;
  nominal_emf_mag_ = 1.0;

  // Mechanical power balances the electrical power of the linearized
  // network at the same operating point, so the no-event trajectory is a
  // bitwise fixed point of the step loop.
  NetworkSolution fixed = solve_network(cfg_.feeder, Complex{1.0, 0.0},
                                        init.pv_current, load_admittance_);
  Complex i_src = (Complex{1.0, 0.0} - fixed.bus_voltage[0]) /
                  cfg_.feeder.source_impedance_pu;
  swing_.p_mech_pu = (Complex{1.0, 0.0} * std::conj(i_src)).real();
  swing_.delta_f_hz = 0.0;
  swing_.delta_rad = 0.0;

  const MeasurementBuses& mb = cfg_.feeder.measurement;
  for (int b : {mb.start, mb.middle, mb.end}) {
    trackers_.emplace_back(std::arg(last_solution_.bus_voltage[b]),
                           cfg_.swing.f_n_hz);
    rocof_.emplace_back(RocofEstimatorCfg{cfg_.rocof.window_s, cfg_.dt_s});
  }

  shadow_ = make_controller_state(cfg_.inverter, cfg_.p_avail_pu);

  result_.scenario_digest = cfg_.scenario_digest;
  const auto n = static_cast<std::size_t>(cfg_.step_count);
  result_.t_s.reserve(n);
  for (auto& bt : result_.bus) {
    bt.v_pu.reserve(n);
    bt.f_hz.reserve(n);
    bt.rocof_hz_per_s.reserve(n);
  }
}

MeasMsg World::measurement(std::uint64_t seq) const {
  const int pcc = cfg_.feeder.measurement.end;
  const Complex v = last_solution_.bus_voltage[pcc];
  MeasMsg m;
  m.seq = seq;
  m.t_s = static_cast<double>(seq) * cfg_.dt_s;
  m.v_mag_pu = std::abs(v);
  m.v_ang_rad = std::arg(v);
  if (result_.t_s.empty()) {
    m.f_local_hz = cfg_.swing.f_n_hz;
    m.rocof_hz_per_s = 0.0;
  } else {
    m.f_local_hz = result_.bus[2].f_hz.back();
    m.rocof_hz_per_s = result_.bus[2].rocof_hz_per_s.back();
  }
  return m;
}

void World::advance(const CmdMsg& cmd) {
  const double t = static_cast<double>(step_index_) * cfg_.dt_s;
  const double delta = swing_.delta_rad;

  // (1) scheduled events act on the source EMF; phase follows the machine.
  const Complex emf =
      apply_events(t, cfg_.events, std::polar(nominal_emf_mag_, delta));

  // (2) the command was produced from the previous step's PCC voltage;
  // mirror the controller with the same measurement so the recorded mode
  // trace is identical in-process and split.
  const int pcc = cfg_.feeder.measurement.end;
  const Complex v_pcc_prev = last_solution_.bus_voltage[pcc];
  reference_controller_step(shadow_, measurement(step_index_), cfg_.inverter,
                            cfg_.p_avail_pu);

  if (cmd.breaker_open && !force_zero_current_) {
    force_zero_current_ = true;
  }
  Complex i_pv{0.0, 0.0};
  if (force_zero_current_) {
    shadow_.inv = apply_trip(shadow_.inv);
  } else {
    i_pv = aligned_current(CurrentRef{cmd.i_p_ref_pu, cmd.i_q_ref_pu}, v_pcc_prev);
  }

  // (3) quasi-static network at this instant.
  NetworkSolution sol = solve_network(cfg_.feeder, emf, i_pv, load_admittance_);

  // (4) machine electrical power from the source branch flow.
  const Complex i_src = (emf - sol.bus_voltage[0]) / cfg_.feeder.source_impedance_pu;
  const double p_elec = (emf * std::conj(i_src)).real();

  // (5) swing dynamics.
  swing_ = swing_step(swing_, cfg_.swing, p_elec, cfg_.dt_s);
  const double system_f = cfg_.swing.f_n_hz + swing_.delta_f_hz;

  // (6) per-bus local frequency from phasor motion relative to the EMF
  // frame, then (7) windowed RoCoF and the relay on the PCC signal.
  const MeasurementBuses& mb = cfg_.feeder.measurement;
  const int buses[3] = {mb.start, mb.middle, mb.end};
  double rocof_pcc = 0.0;
  result_.t_s.push_back(t);
  for (int k = 0; k < 3; ++k) {
    Complex rel = sol.bus_voltage[buses[k]] * std::polar(1.0, -delta);
    double f = trackers_[k].update(rel, system_f, cfg_.dt_s);
    double r = rocof_[k].update(t, f);
    result_.bus[k].v_pu.push_back(std::abs(sol.bus_voltage[buses[k]]));
    result_.bus[k].f_hz.push_back(f);
    result_.bus[k].rocof_hz_per_s.push_back(r);
    if (k == 2) rocof_pcc = r;
  }
  relay_state_ = relay_step(relay_state_, rocof_pcc, cfg_.dt_s, cfg_.relay);
  if (relay_state_.tripped && !force_zero_current_) {
    // (8) a tripped relay isolates the plant from the next step onward.
    force_zero_current_ = true;
    shadow_.inv = apply_trip(shadow_.inv);
  }
  if (relay_state_.tripped && !result_.relay_trip_time_s)
    result_.relay_trip_time_s = relay_state_.trip_time_s;

  const Complex s_pv = sol.bus_voltage[pcc] * std::conj(i_pv);
  result_.pv_p_pu.push_back(s_pv.real());
  result_.pv_q_pu.push_back(s_pv.imag());
  result_.pv_mode.push_back(static_cast<int>(shadow_.inv.mode));
  result_.relay_tripped.push_back(relay_state_.tripped ? 1 : 0);

  last_solution_ = std::move(sol);
  ++step_index_;
}

}  // namespace islesim
