#include "islesim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace islesim {

using nlohmann::json;

std::uint64_t ScenarioSpec::step_count() const {
  return static_cast<std::uint64_t>(std::llround(duration_s / dt_s));
}

namespace {

/// Collects validation problems so a bad file reports everything at once.
struct Problems {
  std::vector<std::string> items;
  void add(const std::string& s) { items.push_back(s); }
  void require(bool ok, const std::string& s) {
    if (!ok) add(s);
  }
  void raise_if_any(const std::string& context) const {
    if (items.empty()) return;
    std::string msg = context + ":";
    for (const auto& s : items) msg += "\n  - " + s;
    throw ValidationError(msg);
  }
};

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where, Problems& p) {
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end())
      p.add(where + ": unknown field \"" + key + "\"");
  }
}

double num(const json& j, const char* key, double fallback, Problems& p,
           const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    p.add(where + "." + key + " must be a number");
    return fallback;
  }
  return j.at(key).get<double>();
}

void validate_spec(const ScenarioSpec& s, Problems& p) {
  p.require(s.dt_s > 0.0, "sim.dt_s must be > 0");
  p.require(s.duration_s >= 1.0, "sim.duration_s must be >= 1 s");
  if (s.dt_s > 0.0) {
    double steps = s.duration_s / s.dt_s;
    p.require(std::abs(steps - std::llround(steps)) < 1e-9,
              "sim.duration_s must be an integer number of steps");
  }
  p.require(s.pv_generation_fraction >= 0.0 && s.pv_generation_fraction <= 1.0,
            "pv_generation_fraction must be within [0, 1]");
  p.require(s.load_scale >= 0.0, "load_scale must be >= 0");
  p.require(s.line_length_factor > 0.0, "line_length_factor must be > 0");
  p.require(s.event.dip_start_s >= 0.0 &&
                s.event.dip_start_s < s.event.dip_clear_s,
            "event requires 0 <= dip_start_s < dip_clear_s");
  p.require(s.event.dip_residual_pu > 0.0 && s.event.dip_residual_pu < 1.0,
            "event.dip_residual_pu must be in (0, 1)");
  p.require(s.relay.threshold_hz_per_s > 0.0,
            "relay.threshold_hz_per_s must be > 0");
  p.require(s.relay.duration_s > 0.0, "relay.duration_s must be > 0");
  p.require(s.inverter.s_rated_pu > 0.0, "inverter.s_rated_pu must be > 0");
  p.require(s.inverter.i_max >= 1.0, "inverter.i_max must be >= 1");
  p.require(s.inverter.v_enter_pu > 0.0 && s.inverter.v_enter_pu <= 1.0,
            "inverter.v_enter_pu must be in (0, 1]");
  p.require(s.inverter.v_exit_pu > 0.0 && s.inverter.v_exit_pu <= 1.0,
            "inverter.v_exit_pu must be in (0, 1]");
  p.require(s.inverter.exit_hold_s >= 0.0, "inverter.exit_hold_s must be >= 0");
  p.require(s.inverter.k_q > 0.0, "inverter.k_q must be > 0");
  p.require(s.inverter.p_ramp_pu_per_s > 0.0,
            "inverter.p_ramp_pu_per_s must be > 0");
  p.require(s.pv_module.p_stc_pu > 0.0, "pv_module.p_stc_pu must be > 0");
  p.require(s.pv_module.gamma_per_k > -0.01 && s.pv_module.gamma_per_k < 0.0,
            "pv_module.gamma_per_k must be in (-0.01, 0)");
  p.require(s.cell_temp_c >= -40.0 && s.cell_temp_c <= 90.0,
            "pv_module.cell_temp_c must be within [-40, 90]");
  p.require(s.swing.h_s > 0.0, "swing.h_s must be > 0");
  p.require(s.swing.d_pu >= 0.0, "swing.d_pu must be >= 0");
  p.require(s.swing.f_n_hz == 50.0 || s.swing.f_n_hz == 60.0,
            "swing.f_n_hz must be 50 or 60");
  p.require(s.swing.s_sys_pu > 0.0, "swing.s_sys_pu must be > 0");
  if (s.dt_s > 0.0)
    p.require(s.rocof_window_s >= 2.0 * s.dt_s,
              "rocof.window_s must cover at least two samples");
}

ScenarioSpec parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object())
    throw ValidationError("scenario file must contain a JSON object");
  ScenarioSpec s;
  Problems p;

  check_keys(j,
             {"feeder_file", "sim", "event", "pv_generation_fraction",
              "load_scale", "line_length_factor", "relay", "inverter",
              "pv_module", "swing", "rocof", "mode"},
             "scenario", p);

  if (j.contains("feeder_file")) {
    if (!j.at("feeder_file").is_string())
      p.add("feeder_file must be a string");
    else
      s.feeder_file = j.at("feeder_file").get<std::string>();
  }
  if (j.contains("sim") && j.at("sim").is_object()) {
    const json& sim = j.at("sim");
    check_keys(sim, {"dt_s", "duration_s"}, "sim", p);
    s.dt_s = num(sim, "dt_s", s.dt_s, p, "sim");
    s.duration_s = num(sim, "duration_s", s.duration_s, p, "sim");
  } else if (j.contains("sim")) {
    p.add("sim must be an object");
  }
  if (j.contains("event") && j.at("event").is_object()) {
    const json& e = j.at("event");
    check_keys(e, {"dip_start_s", "dip_clear_s", "dip_residual_pu"}, "event", p);
    s.event.dip_start_s = num(e, "dip_start_s", s.event.dip_start_s, p, "event");
    s.event.dip_clear_s = num(e, "dip_clear_s", s.event.dip_clear_s, p, "event");
    s.event.dip_residual_pu =
        num(e, "dip_residual_pu", s.event.dip_residual_pu, p, "event");
  } else if (j.contains("event")) {
    p.add("event must be an object");
  }
  s.pv_generation_fraction =
      num(j, "pv_generation_fraction", s.pv_generation_fraction, p, "scenario");
  s.load_scale = num(j, "load_scale", s.load_scale, p, "scenario");
  s.line_length_factor =
      num(j, "line_length_factor", s.line_length_factor, p, "scenario");
  if (j.contains("relay") && j.at("relay").is_object()) {
    const json& r = j.at("relay");
    check_keys(r, {"threshold_hz_per_s", "duration_s"}, "relay", p);
    s.relay.threshold_hz_per_s =
        num(r, "threshold_hz_per_s", s.relay.threshold_hz_per_s, p, "relay");
    s.relay.duration_s = num(r, "duration_s", s.relay.duration_s, p, "relay");
  } else if (j.contains("relay")) {
    p.add("relay must be an object");
  }
  if (j.contains("inverter") && j.at("inverter").is_object()) {
    const json& i = j.at("inverter");
    check_keys(i,
               {"s_rated_pu", "i_max", "v_enter_pu", "v_exit_pu", "exit_hold_s",
                "k_q", "p_ramp_pu_per_s"},
               "inverter", p);
    s.inverter.s_rated_pu = num(i, "s_rated_pu", s.inverter.s_rated_pu, p, "inverter");
    s.inverter.i_max = num(i, "i_max", s.inverter.i_max, p, "inverter");
    s.inverter.v_enter_pu = num(i, "v_enter_pu", s.inverter.v_enter_pu, p, "inverter");
    s.inverter.v_exit_pu = num(i, "v_exit_pu", s.inverter.v_exit_pu, p, "inverter");
    s.inverter.exit_hold_s = num(i, "exit_hold_s", s.inverter.exit_hold_s, p, "inverter");
    s.inverter.k_q = num(i, "k_q", s.inverter.k_q, p, "inverter");
    s.inverter.p_ramp_pu_per_s =
        num(i, "p_ramp_pu_per_s", s.inverter.p_ramp_pu_per_s, p, "inverter");
  } else if (j.contains("inverter")) {
    p.add("inverter must be an object");
  }
  if (j.contains("pv_module") && j.at("pv_module").is_object()) {
    const json& m = j.at("pv_module");
    check_keys(m, {"p_stc_pu", "gamma_per_k", "cell_temp_c"}, "pv_module", p);
    s.pv_module.p_stc_pu = num(m, "p_stc_pu", s.pv_module.p_stc_pu, p, "pv_module");
    s.pv_module.gamma_per_k =
        num(m, "gamma_per_k", s.pv_module.gamma_per_k, p, "pv_module");
    s.cell_temp_c = num(m, "cell_temp_c", s.cell_temp_c, p, "pv_module");
  } else if (j.contains("pv_module")) {
    p.add("pv_module must be an object");
  }
  if (j.contains("swing") && j.at("swing").is_object()) {
    const json& w = j.at("swing");
    check_keys(w, {"h_s", "d_pu", "f_n_hz", "s_sys_pu"}, "swing", p);
    s.swing.h_s = num(w, "h_s", s.swing.h_s, p, "swing");
    s.swing.d_pu = num(w, "d_pu", s.swing.d_pu, p, "swing");
    s.swing.f_n_hz = num(w, "f_n_hz", s.swing.f_n_hz, p, "swing");
    s.swing.s_sys_pu = num(w, "s_sys_pu", s.swing.s_sys_pu, p, "swing");
  } else if (j.contains("swing")) {
    p.add("swing must be an object");
  }
  if (j.contains("rocof") && j.at("rocof").is_object()) {
    const json& r = j.at("rocof");
    check_keys(r, {"window_s"}, "rocof", p);
    s.rocof_window_s = num(r, "window_s", s.rocof_window_s, p, "rocof");
  } else if (j.contains("rocof")) {
    p.add("rocof must be an object");
  }
  if (j.contains("mode")) {
    if (!j.at("mode").is_string()) {
      p.add("mode must be a string");
    } else {
      std::string m = j.at("mode").get<std::string>();
      if (m == "in_process")
        s.mode = ScenarioSpec::Mode::InProcess;
      else if (m == "split")
        s.mode = ScenarioSpec::Mode::Split;
      else
        p.add("mode must be \"in_process\" or \"split\"");
    }
  }

  // Resolve the feeder now so dangling paths surface as validation errors.
  if (s.feeder_file.empty()) {
    s.feeder = default_feeder_spec();
  } else {
    std::filesystem::path fp(s.feeder_file);
    if (fp.is_relative()) fp = base_dir / fp;
    if (!std::filesystem::exists(fp)) {
      p.add("feeder_file does not exist: " + fp.string());
    } else {
      try {
        s.feeder = load_feeder_spec(fp.string());
      } catch (const ValidationError& e) {
        p.add(e.what());
      }
    }
  }

  validate_spec(s, p);
  p.raise_if_any("invalid scenario");
  return s;
}

}  // namespace

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(j, std::filesystem::path(path).parent_path());
}

ScenarioSpec scenario_from_json_text(const std::string& text,
                                     const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(j, base_dir);
}

ScenarioSpec default_scenario() {
  ScenarioSpec s;
  s.feeder = default_feeder_spec();
  return s;
}

void validate_scenario(const ScenarioSpec& spec) {
  Problems p;
  validate_spec(spec, p);
  p.raise_if_any("invalid scenario");
}

std::string scenario_echo_json(const ScenarioSpec& spec) {
  json feeder;
  feeder["bases"] = {{"s_base_mva", spec.feeder.s_base_mva},
                     {"v_base_kv", spec.feeder.v_base_kv}};
  feeder["buses"] = spec.feeder.buses;
  json branches = json::array();
  for (const auto& b : spec.feeder.branches)
    branches.push_back({{"from", b.from},
                        {"to", b.to},
                        {"r_per_km", b.r_per_km},
                        {"x_per_km", b.x_per_km},
                        {"length_km", b.length_km}});
  feeder["branches"] = branches;
  json loads = json::array();
  for (const auto& l : spec.feeder.loads)
    loads.push_back({{"bus", l.bus}, {"p_mw", l.p_mw}, {"pf", l.pf}});
  feeder["loads"] = loads;
  feeder["pv_bus"] = spec.feeder.pv_bus;
  feeder["source_impedance_pu"] = {{"r", spec.feeder.source_impedance_pu.real()},
                                   {"x", spec.feeder.source_impedance_pu.imag()}};

  json j;
  j["feeder"] = feeder;
  j["sim"] = {{"dt_s", spec.dt_s}, {"duration_s", spec.duration_s}};
  j["event"] = {{"dip_start_s", spec.event.dip_start_s},
                {"dip_clear_s", spec.event.dip_clear_s},
                {"dip_residual_pu", spec.event.dip_residual_pu}};
  j["pv_generation_fraction"] = spec.pv_generation_fraction;
  j["load_scale"] = spec.load_scale;
  j["line_length_factor"] = spec.line_length_factor;
  j["relay"] = {{"threshold_hz_per_s", spec.relay.threshold_hz_per_s},
                {"duration_s", spec.relay.duration_s}};
  j["inverter"] = {{"s_rated_pu", spec.inverter.s_rated_pu},
                   {"i_max", spec.inverter.i_max},
                   {"v_enter_pu", spec.inverter.v_enter_pu},
                   {"v_exit_pu", spec.inverter.v_exit_pu},
                   {"exit_hold_s", spec.inverter.exit_hold_s},
                   {"k_q", spec.inverter.k_q},
                   {"p_ramp_pu_per_s", spec.inverter.p_ramp_pu_per_s}};
  j["pv_module"] = {{"p_stc_pu", spec.pv_module.p_stc_pu},
                    {"gamma_per_k", spec.pv_module.gamma_per_k},
                    {"cell_temp_c", spec.cell_temp_c}};
  j["swing"] = {{"h_s", spec.swing.h_s},
                {"d_pu", spec.swing.d_pu},
                {"f_n_hz", spec.swing.f_n_hz},
                {"s_sys_pu", spec.swing.s_sys_pu}};
  j["rocof"] = {{"window_s", spec.rocof_window_s}};
  j["mode"] = spec.mode == ScenarioSpec::Mode::Split ? "split" : "in_process";
  return j.dump(2);
}

std::uint64_t scenario_digest(const ScenarioSpec& spec) {
  // The digest covers the physics contract both peers must share; the
  // execution mode is normalized out so a plant started with --split agrees
  // with a controller reading the same file.
  ScenarioSpec canonical = spec;
  canonical.mode = ScenarioSpec::Mode::InProcess;
  return fnv1a64(scenario_echo_json(canonical));
}

double scenario_p_avail(const ScenarioSpec& spec) {
  OperatingEnv env{spec.pv_generation_fraction * ModuleParams::kGStc,
                   spec.cell_temp_c};
  return mpp_power(spec.pv_module, env);
}

FeederModel scenario_feeder(const ScenarioSpec& spec) {
  FeederModel m = build_feeder(spec.feeder);
  if (spec.line_length_factor != 1.0)
    m = scale_line_length(m, spec.line_length_factor);
  return m;
}

World make_world(const ScenarioSpec& spec) {
  validate_scenario(spec);
  WorldConfig cfg;
  cfg.feeder = scenario_feeder(spec);
  cfg.swing = spec.swing;
  cfg.events = spec.event;
  cfg.inverter = spec.inverter;
  cfg.p_avail_pu = scenario_p_avail(spec);
  cfg.relay = spec.relay;
  cfg.rocof = RocofEstimatorCfg{spec.rocof_window_s, spec.dt_s};
  cfg.dt_s = spec.dt_s;
  cfg.step_count = spec.step_count();

  // Loads are scaled once here; the world's initial power flow then runs at
  // scale 1 on the pre-scaled model.
  for (LoadSpec& l : cfg.feeder.loads) l.p_pu *= spec.load_scale;

  cfg.scenario_digest = scenario_digest(spec);
  return World(cfg);
}

RunResult run_scenario(const ScenarioSpec& spec) {
  World world = make_world(spec);
  ControllerState cs =
      make_controller_state(spec.inverter, scenario_p_avail(spec));
  for (std::uint64_t k = 0; k < world.step_count(); ++k) {
    MeasMsg m = world.measurement(k);
    CmdMsg cmd =
        reference_controller_step(cs, m, spec.inverter, scenario_p_avail(spec));
    world.advance(cmd);
  }
  return world.result();
}

LinkConfig scenario_link(const ScenarioSpec& spec, const std::string& address,
                         LinkRole role) {
  LinkConfig link;
  link.address = address;
  link.role = role;
  link.dt_s = spec.dt_s;
  link.step_count = spec.step_count();
  link.scenario_digest = scenario_digest(spec);
  return link;
}

RunResult run_scenario_split_plant(const ScenarioSpec& spec, Stream& stream,
                                   const std::string& address) {
  World world = make_world(spec);
  return plant_serve(world, stream, scenario_link(spec, address, LinkRole::Plant));
}

int run_scenario_controller(const ScenarioSpec& spec, Stream& stream,
                            const std::string& address) {
  return controller_run(spec.inverter, scenario_p_avail(spec), stream,
                        scenario_link(spec, address, LinkRole::Controller));
}

MetricsSummary compute_metrics(const RunResult& r, const RelaySettings& settings) {
  if (r.t_s.empty()) throw ValidationError("empty run result");
  if (!r.valid) throw ValidationError("run result is marked invalid");

  MetricsSummary m;
  for (int k = 0; k < 3; ++k) {
    double worst = 0.0;
    for (double v : r.bus[k].rocof_hz_per_s) worst = std::max(worst, std::abs(v));
    m.max_abs_rocof_hz_per_s[k] = worst;
  }

  const bool online_tripped = !r.relay_tripped.empty() && r.relay_tripped.back();
  std::optional<double> scan;
  if (r.t_s.size() >= 2)
    scan = scan_for_trip(r.bus[2].rocof_hz_per_s, r.t_s, settings);
  const double dt = r.t_s.size() >= 2 ? r.t_s[1] - r.t_s[0] : 0.0;
  if (online_tripped != scan.has_value())
    throw OracleError(
        "online relay decision disagrees with brute-force window scan");
  if (scan && r.relay_trip_time_s &&
      std::abs(*scan - *r.relay_trip_time_s) > 0.5 * dt + 1e-9)
    throw OracleError("online relay trip time disagrees with brute-force scan");
  m.relay_tripped = online_tripped;
  m.trip_time_s = r.relay_trip_time_s;

  m.voltage_nadir_pu =
      *std::min_element(r.bus[2].v_pu.begin(), r.bus[2].v_pu.end());

  const int normal = 0;
  std::size_t left = r.pv_mode.size();
  for (std::size_t i = 0; i < r.pv_mode.size(); ++i) {
    if (r.pv_mode[i] != normal) {
      left = i;
      break;
    }
  }
  if (left < r.pv_mode.size()) {
    for (std::size_t i = left; i < r.pv_mode.size(); ++i) {
      if (r.pv_mode[i] == normal) {
        m.recovery_time_s = r.t_s[i];
        break;
      }
    }
  }
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_atomically(const std::filesystem::path& final_path,
                      const std::string& content) {
  std::filesystem::path tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw ValidationError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

json metrics_json(const MetricsSummary& m) {
  json j;
  j["max_abs_rocof_hz_per_s"] = {{"start", m.max_abs_rocof_hz_per_s[0]},
                                 {"middle", m.max_abs_rocof_hz_per_s[1]},
                                 {"end", m.max_abs_rocof_hz_per_s[2]}};
  j["relay_tripped"] = m.relay_tripped;
  j["trip_time_s"] = m.trip_time_s ? json(*m.trip_time_s) : json(nullptr);
  j["voltage_nadir_pu"] = m.voltage_nadir_pu;
  j["recovery_time_s"] =
      m.recovery_time_s ? json(*m.recovery_time_s) : json(nullptr);
  return j;
}

}  // namespace

void write_outputs(const RunResult& r, const MetricsSummary& m,
                   const ScenarioSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::ostringstream csv;
  csv << "t_s,v_start_pu,f_start_hz,rocof_start_hzps,"
         "v_middle_pu,f_middle_hz,rocof_middle_hzps,"
         "v_end_pu,f_end_hz,rocof_end_hzps,"
         "pv_p_pu,pv_q_pu,pv_mode,relay_tripped\n";
  for (std::size_t i = 0; i < r.t_s.size(); ++i) {
    csv << csv_field(format_double(r.t_s[i]));
    for (int b = 0; b < 3; ++b) {
      csv << ',' << csv_field(format_double(r.bus[b].v_pu[i]));
      csv << ',' << csv_field(format_double(r.bus[b].f_hz[i]));
      csv << ',' << csv_field(format_double(r.bus[b].rocof_hz_per_s[i]));
    }
    csv << ',' << csv_field(format_double(r.pv_p_pu[i]));
    csv << ',' << csv_field(format_double(r.pv_q_pu[i]));
    csv << ',' << r.pv_mode[i];
    csv << ',' << int(r.relay_tripped[i]);
    csv << '\n';
  }
  write_atomically(dir / "timeseries.csv", csv.str());
  write_atomically(dir / "summary.json", metrics_json(m).dump(2) + "\n");
  write_atomically(dir / "spec.echo.json", scenario_echo_json(spec) + "\n");
}

std::vector<SweepEntry> run_sweep(const SweepSpec& sweep) {
  const bool known = sweep.param == "pv_generation_fraction" ||
                     sweep.param == "load_scale" ||
                     sweep.param == "line_length_factor";
  if (!known)
    throw ValidationError(
        "sweep parameter must be one of pv_generation_fraction, load_scale, "
        "line_length_factor");
  if (sweep.values.empty()) throw ValidationError("sweep needs at least one value");

  std::vector<SweepEntry> out;
  for (double v : sweep.values) {
    SweepEntry e;
    e.value = v;
    ScenarioSpec spec = sweep.base;
    if (sweep.param == "pv_generation_fraction")
      spec.pv_generation_fraction = v;
    else if (sweep.param == "load_scale")
      spec.load_scale = v;
    else
      spec.line_length_factor = v;
    try {
      // Re-validate the mutated spec so out-of-range sweep values are
      // reported per entry instead of exploding mid-run.
      validate_scenario(spec);
      e.result = run_scenario(spec);
      e.metrics = compute_metrics(e.result, spec.relay);
      e.ok = true;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

void check_outputs(const std::filesystem::path& dir) {
  std::ifstream spec_in(dir / "spec.echo.json");
  if (!spec_in)
    throw ValidationError("cannot open " + (dir / "spec.echo.json").string());
  json spec_j;
  try {
    spec_in >> spec_j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("spec.echo.json parse error: ") + e.what());
  }
  RelaySettings settings;
  settings.threshold_hz_per_s =
      spec_j.at("relay").at("threshold_hz_per_s").get<double>();
  settings.duration_s = spec_j.at("relay").at("duration_s").get<double>();

  std::ifstream csv(dir / "timeseries.csv");
  if (!csv)
    throw ValidationError("cannot open " + (dir / "timeseries.csv").string());
  std::string header;
  std::getline(csv, header);
  std::vector<double> t, rocof_end;
  std::vector<int> tripped;
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14)
      throw ValidationError("timeseries.csv row has wrong column count");
    t.push_back(std::stod(cells[0]));
    rocof_end.push_back(std::stod(cells[9]));
    tripped.push_back(std::stoi(cells[13]));
  }
  if (t.size() < 2) throw ValidationError("timeseries.csv has too few rows");

  auto scan = scan_for_trip(rocof_end, t, settings);
  const bool online = tripped.back() != 0;
  if (online != scan.has_value())
    throw OracleError("relay trace in CSV disagrees with brute-force scan");
  if (scan) {
    std::size_t first = 0;
    while (first < tripped.size() && tripped[first] == 0) ++first;
    const double dt = t[1] - t[0];
    if (std::abs(t[first] - *scan) > 0.5 * dt + 1e-9)
      throw OracleError("relay trip time in CSV disagrees with brute-force scan");
  }
}

}  // namespace islesim
