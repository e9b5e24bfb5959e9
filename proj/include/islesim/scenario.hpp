#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "islesim/hilink.hpp"
#include "islesim/results.hpp"
#include "islesim/world.hpp"

namespace islesim {

/// One fully parameterized case study. Defaults reproduce Case Study 1 at
/// 100% PV generation on the shipped synthetic feeder.
struct ScenarioSpec {
  std::string feeder_file;  // empty -> built-in default feeder
  FeederSpec feeder;        // resolved description

  double dt_s = 1e-3;
  double duration_s = 2.0;

  EventSchedule event;

  double pv_generation_fraction = 1.0;
  double load_scale = 1.0;
  double line_length_factor = 1.0;

  RelaySettings relay;
  InverterParams inverter;
  ModuleParams pv_module;
  double cell_temp_c = 25.0;
  SwingParams swing;
  double rocof_window_s = 0.1;

  enum class Mode { InProcess, Split } mode = Mode::InProcess;

  std::uint64_t step_count() const;
};

/// Loads and validates a scenario file (JSON). Unset fields take defaults;
/// an empty object yields the default Case Study 1 spec. Violations are
/// reported exhaustively in one ValidationError.
ScenarioSpec load_scenario(const std::string& path);

/// Same, from an already-parsed JSON text. base_dir resolves relative
/// feeder paths.
ScenarioSpec scenario_from_json_text(const std::string& text,
                                     const std::filesystem::path& base_dir);

ScenarioSpec default_scenario();

/// Re-checks every scenario invariant (bounds, step grid, feeder validity);
/// throws ValidationError listing all violations. Runs automatically before
/// any world is built, so specs mutated in code are held to the same rules
/// as loaded files.
void validate_scenario(const ScenarioSpec& spec);

/// Canonical resolved form of the spec; basis of the digest and of
/// spec.echo.json.
std::string scenario_echo_json(const ScenarioSpec& spec);

/// FNV-1a 64-bit over the canonical resolved scenario JSON. Exchanged in
/// the HELLO frame so plant and controller prove they loaded the same case.
std::uint64_t scenario_digest(const ScenarioSpec& spec);

/// Available PV power implied by the generation fraction: irradiance is
/// fraction * 1000 W/m^2 at the scenario cell temperature.
double scenario_p_avail(const ScenarioSpec& spec);

/// Feeder with the line-length factor applied.
FeederModel scenario_feeder(const ScenarioSpec& spec);

World make_world(const ScenarioSpec& spec);

/// Runs the scenario in-process (mode Split still runs in-process here;
/// use run_scenario_split_plant for the protocol path).
RunResult run_scenario(const ScenarioSpec& spec);

LinkConfig scenario_link(const ScenarioSpec& spec, const std::string& address,
                         LinkRole role);

/// Plant side of a split run over an established stream.
RunResult run_scenario_split_plant(const ScenarioSpec& spec, Stream& stream,
                                   const std::string& address);

/// Controller peer for a split run; returns a process exit status.
int run_scenario_controller(const ScenarioSpec& spec, Stream& stream,
                            const std::string& address);

/// Scenario metrics. Recomputes the trip decision with the brute-force
/// window scan and requires agreement with the online relay trace; throws
/// OracleError on disagreement.
MetricsSummary compute_metrics(const RunResult& r, const RelaySettings& settings);

/// Writes timeseries.csv, summary.json and spec.echo.json into dir using
/// write-then-rename so no partial file ever carries a final name.
void write_outputs(const RunResult& r, const MetricsSummary& m,
                   const ScenarioSpec& spec, const std::filesystem::path& dir);

struct SweepSpec {
  ScenarioSpec base;
  std::string param;  // pv_generation_fraction | load_scale | line_length_factor
  std::vector<double> values;
};

struct SweepEntry {
  double value = 0.0;
  bool ok = false;
  RunResult result;
  MetricsSummary metrics;
  std::string error;  // set when !ok
};

/// One independent run per value, ordered by input; per-value failures are
/// reported without aborting the remaining runs.
std::vector<SweepEntry> run_sweep(const SweepSpec& sweep);

/// Re-checks a written output directory: recomputes the brute-force trip
/// decision from timeseries.csv and compares it with the recorded online
/// relay column. Throws OracleError on disagreement.
void check_outputs(const std::filesystem::path& dir);

}  // namespace islesim
