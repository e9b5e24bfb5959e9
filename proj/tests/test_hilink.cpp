#include "doctest.h"

#include <cstring>
#include <future>
#include <thread>

#include "islesim/hilink.hpp"
#include "islesim/scenario.hpp"

using namespace islesim;

namespace {

ScenarioSpec short_case1() {
  ScenarioSpec spec = default_scenario();
  spec.duration_s = 1.0;  // dip, recovery and settling fit inside 1 s
  return spec;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool results_identical(const RunResult& a, const RunResult& b) {
  bool ok = bitwise_equal(a.t_s, b.t_s) && bitwise_equal(a.pv_p_pu, b.pv_p_pu) &&
            bitwise_equal(a.pv_q_pu, b.pv_q_pu) && a.pv_mode == b.pv_mode &&
            a.relay_tripped == b.relay_tripped;
  for (int k = 0; k < 3; ++k) {
    ok = ok && bitwise_equal(a.bus[k].v_pu, b.bus[k].v_pu) &&
         bitwise_equal(a.bus[k].f_hz, b.bus[k].f_hz) &&
         bitwise_equal(a.bus[k].rocof_hz_per_s, b.bus[k].rocof_hz_per_s);
  }
  return ok;
}

RunResult run_split_over(Stream& plant_end, Stream& controller_end,
                         const ScenarioSpec& spec) {
  auto plant = std::async(std::launch::async, [&] {
    return run_scenario_split_plant(spec, plant_end, "pipe");
  });
  int rc = run_scenario_controller(spec, controller_end, "pipe");
  CHECK(rc == 0);
  return plant.get();
}

}  // namespace

TEST_CASE("split session over a memory pipe matches the in-process run bit for bit") {
  ScenarioSpec spec = short_case1();
  RunResult in_proc = run_scenario(spec);
  REQUIRE(in_proc.valid);

  auto [plant_end, controller_end] = make_memory_pipe();
  RunResult split = run_split_over(*plant_end, *controller_end, spec);
  REQUIRE(split.valid);
  CHECK(results_identical(in_proc, split));
}

TEST_CASE("split session over a local socket matches the memory pipe run") {
  ScenarioSpec spec = short_case1();

  auto [plant_end, controller_end] = make_memory_pipe();
  RunResult piped = run_split_over(*plant_end, *controller_end, spec);

  TcpListener listener("127.0.0.1:0");
  auto plant = std::async(std::launch::async, [&] {
    auto stream = listener.accept(10.0);
    return run_scenario_split_plant(spec, *stream, listener.local_address());
  });
  auto client = tcp_connect(listener.local_address(), 10.0);
  int rc = run_scenario_controller(spec, *client, listener.local_address());
  CHECK(rc == 0);
  RunResult socketed = plant.get();

  CHECK(results_identical(piped, socketed));
}

TEST_CASE("zero-step session closes cleanly with an empty result") {
  ScenarioSpec spec = short_case1();
  WorldConfig cfg;
  cfg.feeder = scenario_feeder(spec);
  cfg.swing = spec.swing;
  cfg.events = spec.event;
  cfg.inverter = spec.inverter;
  cfg.p_avail_pu = scenario_p_avail(spec);
  cfg.relay = spec.relay;
  cfg.rocof = {spec.rocof_window_s, spec.dt_s};
  cfg.dt_s = spec.dt_s;
  cfg.step_count = 0;
  World world(cfg);

  LinkConfig link = scenario_link(spec, "pipe", LinkRole::Plant);
  link.step_count = 0;

  auto [plant_end, controller_end] = make_memory_pipe();
  auto plant = std::async(std::launch::async, [&] {
    return plant_serve(world, *plant_end, link);
  });
  LinkConfig clink = link;
  clink.role = LinkRole::Controller;
  int rc = controller_run(spec.inverter, scenario_p_avail(spec), *controller_end, clink);
  CHECK(rc == 0);
  RunResult r = plant.get();
  CHECK(r.valid);
  CHECK(r.step_count() == 0);
}

TEST_CASE("handshake rejects a version mismatch with an ERROR frame") {
  ScenarioSpec spec = short_case1();
  World world = make_world(spec);
  LinkConfig link = scenario_link(spec, "pipe", LinkRole::Plant);

  auto [plant_end, controller_end] = make_memory_pipe();
  auto plant = std::async(std::launch::async, [&] {
    return plant_serve(world, *plant_end, link);
  });
  write_frame(*controller_end,
              HelloMsg{999, link.dt_s, link.step_count, link.scenario_digest});
  auto reply = read_frame(*controller_end, 5.0);
  REQUIRE(reply.has_value());
  REQUIRE(std::holds_alternative<ErrorMsg>(*reply));
  CHECK(std::get<ErrorMsg>(*reply).code ==
        static_cast<std::uint64_t>(ProtoError::VersionMismatch));
  CHECK_THROWS_AS(plant.get(), ProtocolError);
}

TEST_CASE("handshake rejects a scenario digest mismatch") {
  ScenarioSpec spec = short_case1();
  World world = make_world(spec);
  LinkConfig link = scenario_link(spec, "pipe", LinkRole::Plant);

  auto [plant_end, controller_end] = make_memory_pipe();
  auto plant = std::async(std::launch::async, [&] {
    return plant_serve(world, *plant_end, link);
  });
  write_frame(*controller_end, HelloMsg{link.protocol_version, link.dt_s,
                                        link.step_count, link.scenario_digest ^ 1});
  auto reply = read_frame(*controller_end, 5.0);
  REQUIRE(reply.has_value());
  CHECK(std::get<ErrorMsg>(*reply).code ==
        static_cast<std::uint64_t>(ProtoError::DigestMismatch));
  CHECK_THROWS_AS(plant.get(), ProtocolError);
}

TEST_CASE("plant aborts on a wrong command sequence and flags the result invalid") {
  ScenarioSpec spec = short_case1();
  World world = make_world(spec);
  LinkConfig link = scenario_link(spec, "pipe", LinkRole::Plant);

  auto [plant_end, controller_end] = make_memory_pipe();
  auto plant = std::async(std::launch::async, [&] {
    return plant_serve(world, *plant_end, link);
  });
  write_frame(*controller_end, HelloMsg{link.protocol_version, link.dt_s,
                                        link.step_count, link.scenario_digest});
  auto ack = read_frame(*controller_end, 5.0);
  REQUIRE(ack.has_value());
  REQUIRE(std::holds_alternative<HelloAckMsg>(*ack));
  auto meas = read_frame(*controller_end, 5.0);
  REQUIRE(meas.has_value());
  write_frame(*controller_end, CmdMsg{42, 0.0, 0.0, false});  // wrong seq
  CHECK_THROWS_AS(plant.get(), ProtocolError);
  CHECK(!world.result().valid);
}

TEST_CASE("controller replay matches the in-process reference law per step") {
  ScenarioSpec spec = short_case1();
  const double p_avail = scenario_p_avail(spec);

  // Record the measurement stream of an in-process run.
  World world = make_world(spec);
  ControllerState ref = make_controller_state(spec.inverter, p_avail);
  std::vector<MeasMsg> stream;
  std::vector<CmdMsg> expected;
  for (std::uint64_t k = 0; k < world.step_count(); ++k) {
    MeasMsg m = world.measurement(k);
    stream.push_back(m);
    CmdMsg cmd = reference_controller_step(ref, m, spec.inverter, p_avail);
    expected.push_back(cmd);
    world.advance(cmd);
  }

  // Feed the recorded stream to a controller session over a pipe and
  // compare every reply bit for bit.
  LinkConfig link = scenario_link(spec, "pipe", LinkRole::Controller);
  auto [plant_end, controller_end] = make_memory_pipe();
  auto controller = std::async(std::launch::async, [&] {
    return controller_run(spec.inverter, p_avail, *controller_end, link);
  });
  auto hello = read_frame(*plant_end, 5.0);
  REQUIRE(hello.has_value());
  write_frame(*plant_end, HelloAckMsg{link.protocol_version, link.dt_s,
                                      link.step_count, link.scenario_digest});
  for (std::size_t k = 0; k < stream.size(); ++k) {
    write_frame(*plant_end, stream[k]);
    auto reply = read_frame(*plant_end, 5.0);
    REQUIRE(reply.has_value());
    const auto* cmd = std::get_if<CmdMsg>(&*reply);
    REQUIRE(cmd != nullptr);
    CHECK(*cmd == expected[k]);
  }
  write_frame(*plant_end, ByeMsg{});
  CHECK(controller.get() == 0);
}

TEST_CASE("controller exits nonzero when the plant drops mid-run") {
  ScenarioSpec spec = short_case1();
  LinkConfig link = scenario_link(spec, "pipe", LinkRole::Controller);

  auto [plant_end, controller_end] = make_memory_pipe();
  auto controller = std::async(std::launch::async, [&] {
    return controller_run(spec.inverter, scenario_p_avail(spec), *controller_end,
                          link);
  });
  auto hello = read_frame(*plant_end, 5.0);
  REQUIRE(hello.has_value());
  write_frame(*plant_end, HelloAckMsg{link.protocol_version, link.dt_s,
                                      link.step_count, link.scenario_digest});
  // Serve a few steps, then vanish without BYE.
  for (std::uint64_t k = 0; k < 10; ++k) {
    write_frame(*plant_end, MeasMsg{k, k * 1e-3, 1.0, 0.0, 50.0, 0.0});
    auto cmd = read_frame(*plant_end, 5.0);
    REQUIRE(cmd.has_value());
    CHECK(std::get<CmdMsg>(*cmd).seq == k);
  }
  plant_end->close();
  CHECK(controller.get() == 2);
}

TEST_CASE("breaker command isolates the plant-side inverter") {
  ScenarioSpec spec = short_case1();
  World world = make_world(spec);
  // Drive the plant directly: trip the breaker at step 100.
  ControllerState cs = make_controller_state(spec.inverter, scenario_p_avail(spec));
  for (std::uint64_t k = 0; k < 200; ++k) {
    MeasMsg m = world.measurement(k);
    CmdMsg cmd = reference_controller_step(cs, m, spec.inverter,
                                           scenario_p_avail(spec));
    if (k >= 100) cmd.breaker_open = true;
    world.advance(cmd);
  }
  const RunResult& r = world.result();
  CHECK(r.pv_mode[99] != static_cast<int>(InverterMode::Isolated));
  CHECK(r.pv_mode[100] == static_cast<int>(InverterMode::Isolated));
  CHECK(r.pv_p_pu[100] == 0.0);
  CHECK(r.pv_p_pu[150] == 0.0);
}
