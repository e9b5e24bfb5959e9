// Command-line front end: run case studies, sweep parameters, act as the
// split-mode controller peer, and re-check written outputs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "islesim/scenario.hpp"

namespace {

using namespace islesim;

ScenarioSpec load_or_default(const std::string& path) {
  if (path.empty()) return default_scenario();
  return load_scenario(path);
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            bool split, const std::string& listen_addr) {
  ScenarioSpec spec = load_or_default(scenario_path);
  if (split) spec.mode = ScenarioSpec::Mode::Split;

  RunResult result;
  if (spec.mode == ScenarioSpec::Mode::Split) {
    TcpListener listener(listen_addr);
    std::cout << "listening on " << listener.local_address() << std::endl;
    auto stream = listener.accept(30.0);
    result = run_scenario_split_plant(spec, *stream, listener.local_address());
  } else {
    result = run_scenario(spec);
  }
  MetricsSummary metrics = compute_metrics(result, spec.relay);
  write_outputs(result, metrics, spec, out_dir);
  std::cout << "wrote " << out_dir << " (" << result.step_count()
            << " steps, max |RoCoF| end bus "
            << format_double(metrics.max_abs_rocof_hz_per_s[2]) << " Hz/s, relay "
            << (metrics.relay_tripped ? "TRIPPED" : "no trip") << ")"
            << std::endl;
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir) {
  SweepSpec sweep;
  sweep.base = load_or_default(scenario_path);
  sweep.param = param;
  sweep.values = values;
  auto entries = run_sweep(sweep);

  bool any_failed = false;
  nlohmann::json index = nlohmann::json::array();
  for (const auto& e : entries) {
    std::string sub = param + "_" + format_double(e.value);
    nlohmann::json item;
    item["value"] = e.value;
    item["dir"] = sub;
    if (e.ok) {
      ScenarioSpec spec = sweep.base;
      if (param == "pv_generation_fraction")
        spec.pv_generation_fraction = e.value;
      else if (param == "load_scale")
        spec.load_scale = e.value;
      else
        spec.line_length_factor = e.value;
      write_outputs(e.result, e.metrics, spec,
                    std::filesystem::path(out_dir) / sub);
      item["max_abs_rocof_end_hz_per_s"] = e.metrics.max_abs_rocof_hz_per_s[2];
      item["relay_tripped"] = e.metrics.relay_tripped;
      std::cout << param << " = " << format_double(e.value)
                << ": max |RoCoF| end bus "
                << format_double(e.metrics.max_abs_rocof_hz_per_s[2])
                << " Hz/s, relay "
                << (e.metrics.relay_tripped ? "TRIPPED" : "no trip")
                << std::endl;
    } else {
      any_failed = true;
      item["error"] = e.error;
      std::cout << param << " = " << format_double(e.value)
                << ": FAILED: " << e.error << std::endl;
    }
    index.push_back(item);
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream idx(std::filesystem::path(out_dir) / "sweep.json");
  idx << index.dump(2) << "\n";
  return any_failed ? 2 : 0;
}

int cmd_controller(const std::string& scenario_path, const std::string& addr) {
  ScenarioSpec spec = load_or_default(scenario_path);
  auto stream = tcp_connect(addr, 10.0);
  return run_scenario_controller(spec, *stream, addr);
}

int cmd_check(const std::string& out_dir) {
  check_outputs(out_dir);
  std::cout << out_dir << ": relay trace agrees with brute-force scan"
            << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Islanded-feeder PV stability simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, listen_addr = "127.0.0.1:0", connect_addr;
  std::string param;
  std::vector<double> values;
  bool split = false;

  auto* run = app.add_subcommand("run", "Run one scenario and write outputs");
  run->add_option("--scenario", scenario_path, "Scenario file (JSON)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--split", split, "Serve the plant side of a split session");
  run->add_option("--listen", listen_addr, "host:port to listen on (split mode)");

  auto* sweep = app.add_subcommand("sweep", "Run one scenario per value");
  sweep->add_option("--scenario", scenario_path, "Scenario file (JSON)");
  sweep->add_option("--param", param, "Swept field")->required();
  sweep->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "Output directory")->required();

  auto* controller =
      app.add_subcommand("controller", "Connect as the split-mode controller");
  controller->add_option("--connect", connect_addr, "host:port of the plant")
      ->required();
  controller->add_option("--scenario", scenario_path,
                         "Scenario file (must match the plant's)");

  auto* check = app.add_subcommand("check", "Re-run the relay oracle on outputs");
  check->add_option("--out", out_dir, "Output directory to check")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir, split, listen_addr);
    if (sweep->parsed()) return cmd_sweep(scenario_path, param, values, out_dir);
    if (controller->parsed()) return cmd_controller(scenario_path, connect_addr);
    if (check->parsed()) return cmd_check(out_dir);
  } catch (const islesim::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << std::endl;
    return 1;
  } catch (const islesim::OracleError& e) {
    std::cerr << "oracle disagreement: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
