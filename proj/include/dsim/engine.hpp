// Transient network simulation: integrates the coupled segment ODE with
// switched membrane sources, detects threshold events, and records waveforms.
//
// Per node i the dynamics are
//   C_i dV_i/dt = (v_rest - V_i)/R_leak_i + sum_j (V_j - V_i)/R_edge_ij
//                 + I_source_i(phase) + I_stim_i(t)
// advanced by explicit forward Euler (or optional RK4) with the channel
// states updated once per step from the (previous, current) voltage pair.
// Sources are ideal: voltage dependent, not load dependent.
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dsim/network.hpp"
#include "dsim/segment.hpp"

namespace dsim {

enum class Integrator { ForwardEuler, RungeKutta4 };

struct SimConfig {
  double dt = 1e-6;          // s
  double t_end = 50e-3;      // s; rounded to a whole number of steps
  int record_stride = 10;    // keep one sample every N steps
  Integrator integrator = Integrator::ForwardEuler;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end > dt)) throw std::invalid_argument("t_end must exceed dt");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be at least 1");
  }

  bool operator==(const SimConfig&) const = default;
};

// Phase transitions, named for the phase being entered (Rearm = back to Resting).
enum class Transition { Depolarize, Repolarize, Recover, Rearm };

inline std::string_view transition_name(Transition k) {
  switch (k) {
    case Transition::Depolarize: return "depolarize";
    case Transition::Repolarize: return "repolarize";
    case Transition::Recover: return "recover";
    case Transition::Rearm: return "rearm";
  }
  return "?";
}

struct Event {
  NodeId node = 0;
  double time = 0.0;
  Transition kind = Transition::Depolarize;

  bool operator==(const Event&) const = default;
};

// Decimated voltage traces plus the undecimated event log of one run.
struct WaveformSet {
  std::vector<double> times;                  // sample instants, s
  std::vector<std::vector<double>> voltages;  // [node][sample], V
  std::vector<Event> events;
  double v_rest = 0.0;
  double v_trig = 0.0;

  std::vector<double> event_times(NodeId node, Transition kind) const {
    std::vector<double> out;
    for (const Event& e : events)
      if (e.node == node && e.kind == kind) out.push_back(e.time);
    return out;
  }

  int event_count(NodeId node, Transition kind) const {
    int c = 0;
    for (const Event& e : events)
      if (e.node == node && e.kind == kind) ++c;
    return c;
  }

  bool has_event(NodeId node, Transition kind) const { return event_count(node, kind) > 0; }
};

// Numerical blow-up: some node voltage left the plausible band.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(NodeId node_, double time_, double voltage_)
      : std::runtime_error(format(node_, time_, voltage_)),
        node(node_), time(time_), voltage(voltage_) {}

  NodeId node;
  double time;
  double voltage;

 private:
  static std::string format(NodeId node, double time, double voltage) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "voltage blow-up at node %d, t=%.9g s (V=%.3g V)",
                  node, time, voltage);
    return buf;
  }
};

inline double edge_resistance(const Topology& t, NodeId i, NodeId j) {
  for (const Edge& e : t.edges)
    if ((e.a == i && e.b == j) || (e.a == j && e.b == i)) return e.resistance;
  throw std::out_of_range("no edge between nodes " + std::to_string(i) + " and " +
                          std::to_string(j));
}

namespace detail {

// Compressed adjacency: per node, (neighbor, edge conductance) pairs.
struct Coupling {
  std::vector<int> offset;
  std::vector<NodeId> neighbor;
  std::vector<double> conductance;

  explicit Coupling(const Topology& t) {
    const int n = t.node_count();
    std::vector<int> degree(n, 0);
    for (const Edge& e : t.edges) {
      ++degree[e.a];
      ++degree[e.b];
    }
    offset.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) offset[i + 1] = offset[i] + degree[i];
    neighbor.resize(offset[n]);
    conductance.resize(offset[n]);
    std::vector<int> fill(offset.begin(), offset.end() - 1);
    for (const Edge& e : t.edges) {
      const double g = 1.0 / e.resistance;
      neighbor[fill[e.a]] = e.b;
      conductance[fill[e.a]++] = g;
      neighbor[fill[e.b]] = e.a;
      conductance[fill[e.b]++] = g;
    }
  }
};

}  // namespace detail

// Runs one transient simulation. Initial condition is every node at v_rest
// and Resting. Throws SimulationError if any |V| exceeds 1 V.
inline WaveformSet simulate(const Topology& topo, const std::vector<Stimulus>& stimuli,
                            const SimConfig& cfg, const MembraneConstants& mc) {
  cfg.validate();
  mc.validate();
  if (ValidationReport rep = validate(topo); !rep.ok())
    throw std::invalid_argument("invalid topology: " + rep.issues.front());
  for (const Stimulus& s : stimuli) {
    s.validate();
    if (s.target < 0 || s.target >= topo.node_count())
      throw std::invalid_argument("stimulus targets missing node " + std::to_string(s.target));
  }

  const int n = topo.node_count();
  const long steps = std::llround(cfg.t_end / cfg.dt);
  const detail::Coupling coupling(topo);

  std::vector<double> inv_cap(n), g_leak(n), source(n);
  for (int i = 0; i < n; ++i) {
    inv_cap[i] = 1.0 / topo.segments[i].cap;
    g_leak[i] = 1.0 / topo.segments[i].r_leak;
  }

  std::vector<double> v(n, mc.v_rest), v_next(n), stim_now(n, 0.0);
  std::vector<Phase> phase(n, Phase::Resting);
  std::vector<char> trigger_done(stimuli.size(), 0);

  WaveformSet w;
  w.v_rest = mc.v_rest;
  w.v_trig = mc.v_trig;
  const long samples = steps / cfg.record_stride + 1;
  w.times.reserve(samples);
  w.voltages.assign(n, {});
  for (auto& series : w.voltages) series.reserve(samples);

  auto record = [&](double t) {
    w.times.push_back(t);
    for (int i = 0; i < n; ++i) w.voltages[i].push_back(v[i]);
  };

  // injected current per node at time t
  auto gather_stimuli = [&](double t, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const Stimulus& s : stimuli)
      if (s.kind == Stimulus::Kind::CurrentInjection && t >= s.start &&
          t < s.start + s.duration)
        out[s.target] += s.amplitude;
  };

  auto derivative = [&](const std::vector<double>& state, const std::vector<double>& stim,
                        std::vector<double>& dv) {
    for (int i = 0; i < n; ++i) {
      double current = g_leak[i] * (mc.v_rest - state[i]) + source[i] + stim[i];
      for (int k = coupling.offset[i]; k < coupling.offset[i + 1]; ++k)
        current += coupling.conductance[k] * (state[coupling.neighbor[k]] - state[i]);
      dv[i] = current * inv_cap[i];
    }
  };

  std::vector<double> k1, k2, k3, k4, mid, stim_mid, stim_end;
  if (cfg.integrator == Integrator::RungeKutta4) {
    k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n);
    mid.resize(n); stim_mid.resize(n); stim_end.resize(n);
  } else {
    k1.resize(n);
  }

  record(0.0);

  for (long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * cfg.dt;
    const double t_next = static_cast<double>(step + 1) * cfg.dt;

    // due force triggers fire before the step; one-shot
    for (std::size_t si = 0; si < stimuli.size(); ++si) {
      const Stimulus& s = stimuli[si];
      if (s.kind != Stimulus::Kind::ForceTrigger || trigger_done[si] || t < s.start) continue;
      trigger_done[si] = 1;
      if (phase[s.target] == Phase::Resting && topo.segments[s.target].na_enabled) {
        phase[s.target] = Phase::Depolarizing;
        w.events.push_back({s.target, t, Transition::Depolarize});
      }
    }

    for (int i = 0; i < n; ++i) source[i] = source_current(phase[i], topo.segments[i]);
    gather_stimuli(t, stim_now);

    if (cfg.integrator == Integrator::ForwardEuler) {
      derivative(v, stim_now, k1);
      for (int i = 0; i < n; ++i) v_next[i] = v[i] + cfg.dt * k1[i];
    } else {
      // classic RK4; channel states and sources are held for the whole step
      gather_stimuli(t + 0.5 * cfg.dt, stim_mid);
      gather_stimuli(t_next, stim_end);
      derivative(v, stim_now, k1);
      for (int i = 0; i < n; ++i) mid[i] = v[i] + 0.5 * cfg.dt * k1[i];
      derivative(mid, stim_mid, k2);
      for (int i = 0; i < n; ++i) mid[i] = v[i] + 0.5 * cfg.dt * k2[i];
      derivative(mid, stim_mid, k3);
      for (int i = 0; i < n; ++i) mid[i] = v[i] + cfg.dt * k3[i];
      derivative(mid, stim_end, k4);
      for (int i = 0; i < n; ++i)
        v_next[i] = v[i] + cfg.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    for (int i = 0; i < n; ++i) {
      const Phase before = phase[i];
      const Phase after = step_channel_state(before, v[i], v_next[i], topo.segments[i], mc);
      if (after != before) {
        Transition kind = Transition::Rearm;
        if (after == Phase::Depolarizing) kind = Transition::Depolarize;
        else if (after == Phase::Repolarizing) kind = Transition::Repolarize;
        else if (after == Phase::Recovering) kind = Transition::Recover;
        w.events.push_back({i, t_next, kind});
        phase[i] = after;
      }
    }

    v.swap(v_next);

    for (int i = 0; i < n; ++i)
      if (!(std::abs(v[i]) <= 1.0)) throw SimulationError(i, t_next, v[i]);

    if ((step + 1) % cfg.record_stride == 0) record(t_next);
  }

  return w;
}

// CSV: header `time_s,<node-id>,...`, one row per retained sample.
inline void write_waveforms_csv(const WaveformSet& w, std::ostream& out) {
  out << "time_s";
  for (std::size_t i = 0; i < w.voltages.size(); ++i) out << ',' << i;
  out << '\n';
  char buf[32];
  for (std::size_t s = 0; s < w.times.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.12g", w.times[s]);
    out << buf;
    for (const auto& series : w.voltages) {
      std::snprintf(buf, sizeof buf, "%.12g", series[s]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

// CSV: `node,time_s,transition`, one row per event in log order.
inline void write_events_csv(const WaveformSet& w, std::ostream& out) {
  out << "node,time_s,transition\n";
  char buf[32];
  for (const Event& e : w.events) {
    std::snprintf(buf, sizeof buf, "%.12g", e.time);
    out << e.node << ',' << buf << ',' << transition_name(e.kind) << '\n';
  }
}

}  // namespace dsim
