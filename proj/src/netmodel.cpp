#include "islesim/netmodel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace islesim {

double PerUnitBase::i_base_a() const {
  return s_base_va / (std::sqrt(3.0) * v_base_v);
}

double LoadSpec::q_pu() const {
  return p_pu * std::tan(std::acos(power_factor));
}

namespace {

// Parent/children arrangement of the tree, buses ordered root-first.
struct Topology {
  std::vector<int> parent;        // parent bus of each bus (-1 for source)
  std::vector<int> parent_branch; // branch index feeding each bus (-1 for source)
  std::vector<int> order;         // breadth-first order from the source
};

Topology analyze_topology(const FeederModel& m) {
  const int n = m.bus_count();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, branch)
  for (int bi = 0; bi < static_cast<int>(m.branches.size()); ++bi) {
    const Branch& b = m.branches[bi];
    adj[b.from_bus].push_back({b.to_bus, bi});
    adj[b.to_bus].push_back({b.from_bus, bi});
  }
  Topology t;
  t.parent.assign(n, -2);
  t.parent_branch.assign(n, -1);
  t.order.reserve(n);
  t.parent[0] = -1;
  t.order.push_back(0);
  for (size_t head = 0; head < t.order.size(); ++head) {
    int u = t.order[head];
    for (auto [v, bi] : adj[u]) {
      if (bi == t.parent_branch[u]) continue;
      if (t.parent[v] != -2)
        throw ValidationError("feeder topology contains a cycle");
      t.parent[v] = u;
      t.parent_branch[v] = bi;
      t.order.push_back(v);
    }
  }
  if (static_cast<int>(t.order.size()) != n)
    throw ValidationError("feeder topology is not connected");
  return t;
}

}  // namespace

FeederModel build_feeder(const FeederSpec& raw) {
  if (raw.s_base_mva <= 0.0 || raw.v_base_kv <= 0.0)
    throw ValidationError("per-unit bases must be strictly positive");
  if (raw.buses.empty()) throw ValidationError("feeder has no buses");
  if (raw.pv_bus.empty()) throw ValidationError("pv_bus is required");
  if (!(raw.source_impedance_pu.real() > 0.0) ||
      !(raw.source_impedance_pu.imag() > 0.0))
    throw ValidationError("source impedance must have positive real and imaginary parts");

  FeederModel m;
  m.base.s_base_va = raw.s_base_mva * 1e6;
  m.base.v_base_v = raw.v_base_kv * 1e3;
  m.bus_names = raw.buses;
  m.source_impedance_pu = raw.source_impedance_pu;

  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(raw.buses.size()); ++i) {
    if (!index.emplace(raw.buses[i], i).second)
      throw ValidationError("duplicate bus name: " + raw.buses[i]);
  }
  auto resolve = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end())
      throw ValidationError("reference to unknown bus: " + name);
    return it->second;
  };

  for (const auto& rb : raw.branches) {
    if (rb.length_km < 0.0) throw ValidationError("branch length must be >= 0");
    if (rb.r_per_km < 0.0) throw ValidationError("branch r_per_km must be >= 0");
    if (!(rb.x_per_km > 0.0)) throw ValidationError("branch x_per_km must be > 0");
    m.branches.push_back(Branch{resolve(rb.from), resolve(rb.to), rb.r_per_km,
                                rb.x_per_km, rb.length_km});
  }
  if (m.branches.size() + 1 != m.bus_names.size())
    throw ValidationError("radial feeder needs exactly bus_count-1 branches");

  for (const auto& rl : raw.loads) {
    if (rl.p_mw < 0.0) throw ValidationError("load active power must be >= 0");
    if (!(rl.pf > 0.0) || rl.pf > 1.0)
      throw ValidationError("load power factor must be in (0, 1]");
    m.loads.push_back(
        LoadSpec{resolve(rl.bus), rl.p_mw * 1e6 / m.base.s_base_va, rl.pf});
  }
  m.pv_bus = resolve(raw.pv_bus);

  Topology topo = analyze_topology(m);

  // Measurement points along the source->PV path: first bus after the
  // source, the topologically middle bus, and the PV bus itself.
  std::vector<int> path;
  for (int u = m.pv_bus; u != -1; u = topo.parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  if (path.size() < 2)
    throw ValidationError("PV bus must not be the source bus");
  m.measurement.start = path[1];
  m.measurement.middle = path[path.size() / 2];
  m.measurement.end = m.pv_bus;
  return m;
}

FeederSpec default_feeder_spec() {
  FeederSpec s;
  s.s_base_mva = 10.0;
  s.v_base_kv = 11.0;
  s.buses = {"grid", "b1", "b2", "b3", "b4", "b5", "pv"};
  const double seg = 5.0 / 6.0;
  for (size_t i = 0; i + 1 < s.buses.size(); ++i)
    s.branches.push_back({s.buses[i], s.buses[i + 1], 0.10, 0.40, seg});
  for (int i = 1; i <= 5; ++i)
    s.loads.push_back({s.buses[i], 0.10, 0.9});
  s.pv_bus = "pv";
  s.source_impedance_pu = Complex{0.02, 0.08};
  return s;
}

FeederModel default_feeder() { return build_feeder(default_feeder_spec()); }

FeederSpec load_feeder_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open feeder file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("feeder file " + path + ": " + e.what());
  }
  try {
    FeederSpec s;
    const auto& bases = j.at("bases");
    s.s_base_mva = bases.at("s_base_mva").get<double>();
    s.v_base_kv = bases.at("v_base_kv").get<double>();
    s.buses = j.at("buses").get<std::vector<std::string>>();
    for (const auto& jb : j.at("branches")) {
      FeederSpec::RawBranch b;
      b.from = jb.at("from").get<std::string>();
      b.to = jb.at("to").get<std::string>();
      b.r_per_km = jb.at("r_per_km").get<double>();
      b.x_per_km = jb.at("x_per_km").get<double>();
      b.length_km = jb.at("length_km").get<double>();
      s.branches.push_back(b);
    }
    for (const auto& jl : j.at("loads")) {
      FeederSpec::RawLoad l;
      l.bus = jl.at("bus").get<std::string>();
      l.p_mw = jl.at("p_mw").get<double>();
      l.pf = jl.at("pf").get<double>();
      s.loads.push_back(l);
    }
    s.pv_bus = j.at("pv_bus").get<std::string>();
    const auto& z = j.at("source_impedance_pu");
    s.source_impedance_pu = Complex{z.at("r").get<double>(), z.at("x").get<double>()};
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("feeder file " + path + ": " + e.what());
  }
}

FeederModel scale_line_length(const FeederModel& model, double factor) {
  if (!(factor > 0.0)) throw ValidationError("line length factor must be > 0");
  FeederModel out = model;
  for (Branch& b : out.branches) b.length_km *= factor;
  return out;
}

namespace {

// Net device complex power injected at each bus (loads negative).
std::vector<Complex> device_powers(const FeederModel& m, Complex pv_power,
                                   double load_scale) {
  std::vector<Complex> s(m.bus_count(), Complex{0.0, 0.0});
  for (const LoadSpec& l : m.loads)
    s[l.bus] -= load_scale * Complex{l.p_pu, l.q_pu()};
  s[m.pv_bus] += pv_power;
  return s;
}

}  // namespace

PowerFlowInit init_power_flow(const FeederModel& model, Complex pv_power_pu,
                              double load_scale, Complex source_emf) {
  if (load_scale < 0.0) throw ValidationError("load_scale must be >= 0");
  const int n = model.bus_count();
  Topology topo = analyze_topology(model);
  std::vector<Complex> z(model.branches.size());
  for (size_t i = 0; i < model.branches.size(); ++i)
    z[i] = model.branch_impedance_pu(model.branches[i]);

  std::vector<Complex> s_dev = device_powers(model, pv_power_pu, load_scale);
  std::vector<Complex> v(n, source_emf);
  std::vector<Complex> i_branch(model.branches.size(), Complex{0.0, 0.0});

  int iter = 0;
  for (;; ++iter) {
    if (iter >= kSweepMaxIter)
      throw ConvergenceError("power flow did not converge (infeasible loading?)");
    // Backward: accumulate branch currents from the leaves toward the source.
    std::vector<Complex> down(n, Complex{0.0, 0.0});
    for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
      int u = *it;
      Complex draw = std::conj(s_dev[u] / v[u]) * -1.0 + down[u];
      if (topo.parent_branch[u] >= 0) {
        i_branch[topo.parent_branch[u]] = draw;
        down[topo.parent[u]] += draw;
      } else {
        down[u] = draw;  // total current drawn from the source EMF
      }
    }
    // Forward: propagate voltages from the EMF through the tree.
    double max_dv = 0.0;
    for (int u : topo.order) {
      Complex v_new;
      if (u == 0) {
        v_new = source_emf - model.source_impedance_pu * down[0];
      } else {
        int pb = topo.parent_branch[u];
        v_new = v[topo.parent[u]] - z[pb] * i_branch[pb];
      }
      max_dv = std::max(max_dv, std::abs(v_new - v[u]));
      v[u] = v_new;
    }
    if (max_dv < kSweepTol) break;
  }

  PowerFlowInit out;
  out.solution.bus_voltage = v;
  out.solution.branch_current = i_branch;
  out.solution.injection.assign(n, Complex{0.0, 0.0});
  for (int u = 0; u < n; ++u) out.solution.injection[u] = s_dev[u];
  out.load_admittance.assign(n, Complex{0.0, 0.0});
  for (const LoadSpec& l : model.loads) {
    Complex s = load_scale * Complex{l.p_pu, l.q_pu()};
    out.load_admittance[l.bus] += std::conj(s) / std::norm(v[l.bus]);
  }
  out.pv_current = std::conj(pv_power_pu / v[model.pv_bus]);
  return out;
}

NetworkSolution solve_network(const FeederModel& model, Complex source_emf,
                              Complex pv_current,
                              std::span<const Complex> load_admittance) {
  const int n = model.bus_count();
  if (static_cast<int>(load_admittance.size()) != n)
    throw ValidationError("load admittance vector size mismatch");

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  const Complex y_src = 1.0 / model.source_impedance_pu;
  y(0, 0) += y_src;
  for (const Branch& b : model.branches) {
    Complex yb = 1.0 / model.branch_impedance_pu(b);
    y(b.from_bus, b.from_bus) += yb;
    y(b.to_bus, b.to_bus) += yb;
    y(b.from_bus, b.to_bus) -= yb;
    y(b.to_bus, b.from_bus) -= yb;
  }
  for (int i = 0; i < n; ++i) y(i, i) += load_admittance[i];

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(0) += source_emf * y_src;
  rhs(model.pv_bus) += pv_current;

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(y);
  if (!lu.isInvertible())
    throw ConvergenceError("singular network (zero-impedance loop or disconnected bus)");
  Eigen::VectorXcd v = lu.solve(rhs);

  NetworkSolution sol;
  sol.bus_voltage.assign(v.data(), v.data() + n);
  sol.branch_current.resize(model.branches.size());
  for (size_t i = 0; i < model.branches.size(); ++i) {
    const Branch& b = model.branches[i];
    sol.branch_current[i] = (sol.bus_voltage[b.from_bus] - sol.bus_voltage[b.to_bus]) /
                            model.branch_impedance_pu(b);
  }
  // Net device power at each bus implied by the solution.
  sol.injection.assign(n, Complex{0.0, 0.0});
  std::vector<Complex> i_out(n, Complex{0.0, 0.0});
  i_out[0] += (sol.bus_voltage[0] - source_emf) * y_src;
  for (size_t i = 0; i < model.branches.size(); ++i) {
    const Branch& b = model.branches[i];
    i_out[b.from_bus] += sol.branch_current[i];
    i_out[b.to_bus] -= sol.branch_current[i];
  }
  for (int u = 0; u < n; ++u) {
    i_out[u] += load_admittance[u] * sol.bus_voltage[u];
    sol.injection[u] = sol.bus_voltage[u] * std::conj(i_out[u]);
  }
  return sol;
}

double max_power_residual(const FeederModel& model, const NetworkSolution& sol,
                          std::span<const Complex> device_injection,
                          Complex source_emf) {
  // Device injection at each bus must equal the net branch flow out of it;
  // the source bus additionally exports into the EMF branch.
  const int n = model.bus_count();
  std::vector<Complex> i_out(n, Complex{0.0, 0.0});
  i_out[0] = (sol.bus_voltage[0] - source_emf) / model.source_impedance_pu;
  for (size_t i = 0; i < model.branches.size(); ++i) {
    const Branch& b = model.branches[i];
    i_out[b.from_bus] += sol.branch_current[i];
    i_out[b.to_bus] -= sol.branch_current[i];
  }
  double worst = 0.0;
  for (int u = 0; u < n; ++u) {
    Complex s_flow = sol.bus_voltage[u] * std::conj(i_out[u]);
    worst = std::max(worst, std::abs(device_injection[u] - s_flow));
  }
  return worst;
}

}  // namespace islesim
