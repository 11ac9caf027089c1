// Boolean analysis on top of the simulator: output detection, truth tables,
// two-input gate naming, vertex-resistance regime sweeps, and pulse metrics.
#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "dsim/engine.hpp"
#include "dsim/network.hpp"

namespace dsim {

// Response of a two-input gate, indexed by input pair (a,b) as a*2+b.
struct TruthTable {
  std::array<bool, 4> outputs{};

  bool at(bool a, bool b) const { return outputs[(a ? 2 : 0) + (b ? 1 : 0)]; }
  void set(bool a, bool b, bool value) { outputs[(a ? 2 : 0) + (b ? 1 : 0)] = value; }

  bool operator==(const TruthTable&) const = default;
};

// The sixteen two-input Boolean functions.
enum class GateKind {
  False, And, ANimpB, A, BNimpA, B, Xor, Or,
  Nor, Xnor, NotB, BImpA, NotA, AImpB, Nand, True,
};

inline std::string_view gate_name(GateKind g) {
  constexpr std::string_view names[16] = {
      "FALSE", "AND",   "A_NIMP_B", "A",     "B_NIMP_A", "B",     "XOR",  "OR",
      "NOR",   "XNOR",  "NOT_B",    "B_IMP_A", "NOT_A",  "A_IMP_B", "NAND", "TRUE",
  };
  return names[static_cast<int>(g)];
}

// Exact lookup of the 16-entry bijection between tables and gate names.
constexpr GateKind classify_gate(const TruthTable& tt) {
  const int idx = (tt.outputs[0] ? 8 : 0) | (tt.outputs[1] ? 4 : 0) |
                  (tt.outputs[2] ? 2 : 0) | (tt.outputs[3] ? 1 : 0);
  return static_cast<GateKind>(idx);
}

constexpr TruthTable gate_table(GateKind g) {
  const int idx = static_cast<int>(g);
  TruthTable tt;
  tt.outputs = {(idx & 8) != 0, (idx & 4) != 0, (idx & 2) != 0, (idx & 1) != 0};
  return tt;
}

// True iff the probe node completed a full upstroke (triggered and reached
// v_max); a grazing pass of the trigger threshold does not count.
inline bool detect_output(const WaveformSet& w, NodeId probe) {
  if (probe < 0 || probe >= static_cast<NodeId>(w.voltages.size()))
    throw std::out_of_range("unknown probe node " + std::to_string(probe));
  return w.has_event(probe, Transition::Depolarize) &&
         w.has_event(probe, Transition::Repolarize);
}

// How each Boolean input is driven when it is logic 1.
struct InputDrive {
  Stimulus::Kind kind = Stimulus::Kind::CurrentInjection;
  double amplitude = 1e-9;   // A
  double start = 1e-3;       // s
  double duration = 0.5e-3;  // s

  Stimulus stimulus(NodeId node, double delay) const {
    if (kind == Stimulus::Kind::CurrentInjection)
      return Stimulus::injection(node, amplitude, start + delay, duration);
    return Stimulus::trigger(node, start + delay);
  }

  bool operator==(const InputDrive&) const = default;
};

// Runs the four input combinations (neither, b only, a only, both) and
// collects the detected output for each. In the both-inputs case the second
// input (b) is delayed by skew.
inline TruthTable truth_table(const Topology& t, const SimConfig& cfg,
                              const MembraneConstants& mc, const InputDrive& drive = {},
                              double skew = 0.0) {
  const NodeId a = t.label("input_a");
  const NodeId b = t.label("input_b");
  const NodeId probe = t.label("output_probe");
  TruthTable tt;
  for (int a_on = 0; a_on <= 1; ++a_on)
    for (int b_on = 0; b_on <= 1; ++b_on) {
      std::vector<Stimulus> stims;
      if (a_on) stims.push_back(drive.stimulus(a, 0.0));
      if (b_on) stims.push_back(drive.stimulus(b, a_on ? skew : 0.0));
      tt.set(a_on, b_on, detect_output(simulate(t, stims, cfg, mc), probe));
    }
  return tt;
}

struct RegimeSample {
  double r_vertex = 0.0;
  GateKind gate = GateKind::False;

  bool operator==(const RegimeSample&) const = default;
};

// One maximal constant-gate interval of the scanned range.
struct RegimeInterval {
  double r_low = 0.0;
  double r_high = 0.0;
  GateKind gate = GateKind::False;

  bool operator==(const RegimeInterval&) const = default;
};

struct RegimeReport {
  std::vector<RegimeSample> samples;      // sorted by r_vertex
  std::vector<RegimeInterval> intervals;  // partition of the scanned range

  const RegimeInterval* find(GateKind g) const {
    for (const RegimeInterval& iv : intervals)
      if (iv.gate == g) return &iv;
    return nullptr;
  }
};

struct SweepParams {
  MergeSpec base;              // r_vertex is overridden per grid point
  double r_lo = 10e6;          // Ohm
  double r_hi = 400e6;         // Ohm
  double coarse_step = 10e6;   // Ohm
  double resolution = 1e6;     // boundary refinement target, Ohm
  SimConfig sim{};
  MembraneConstants mc{};
  InputDrive drive{};
  double skew = 0.0;
};

// Classifies the realized gate on a coarse grid of vertex resistances, then
// refines every boundary between differing classifications by bisection down
// to the requested resolution. Bisection probes that reveal a third gate
// between two grid points split into two refinements, so regimes narrower
// than the coarse step are still resolved.
inline RegimeReport sweep_vertex_resistance(const SweepParams& p) {
  if (!(p.r_lo <= p.r_hi)) throw std::invalid_argument("r range must be ascending");
  if (!(p.coarse_step > 0.0)) throw std::invalid_argument("coarse_step must be positive");
  if (!(p.resolution > 0.0)) throw std::invalid_argument("resolution must be positive");

  auto classify = [&](double r) {
    MergeSpec spec = p.base;
    spec.r_vertex = r;
    return classify_gate(truth_table(build_merge_topology(spec), p.sim, p.mc, p.drive, p.skew));
  };

  std::map<double, GateKind> samples;
  for (double r = p.r_lo; r < p.r_hi; r += p.coarse_step) samples.emplace(r, classify(r));
  samples.emplace(p.r_hi, classify(p.r_hi));

  // refine adjacent differing classifications
  std::vector<std::pair<double, double>> pending;
  auto collect = [&] {
    pending.clear();
    for (auto it = samples.begin(), next = std::next(it); next != samples.end(); ++it, ++next)
      if (it->second != next->second && next->first - it->first > p.resolution)
        pending.emplace_back(it->first, next->first);
  };
  for (collect(); !pending.empty(); collect())
    for (auto [lo, hi] : pending) samples.emplace((lo + hi) / 2.0, classify((lo + hi) / 2.0));

  RegimeReport rep;
  for (const auto& [r, g] : samples) rep.samples.push_back({r, g});

  double low = p.r_lo;
  for (std::size_t i = 0; i + 1 < rep.samples.size(); ++i) {
    if (rep.samples[i].gate == rep.samples[i + 1].gate) continue;
    const double boundary = (rep.samples[i].r_vertex + rep.samples[i + 1].r_vertex) / 2.0;
    rep.intervals.push_back({low, boundary, rep.samples[i].gate});
    low = boundary;
  }
  rep.intervals.push_back({low, p.r_hi, rep.samples.back().gate});
  return rep;
}

// Full width at half amplitude of the first pulse, where the amplitude is
// measured from the rest potential to the pulse peak. Returns nothing if the
// node never exceeds the trigger threshold; a pulse still in progress at the
// end of the run is measured to the final sample.
inline std::optional<double> pulse_width(const WaveformSet& w, NodeId node) {
  if (node < 0 || node >= static_cast<NodeId>(w.voltages.size()))
    throw std::out_of_range("unknown node " + std::to_string(node));
  const std::vector<double>& v = w.voltages[node];
  const std::vector<double>& t = w.times;

  std::size_t first_above = 0;
  while (first_above < v.size() && !(v[first_above] > w.v_trig)) ++first_above;
  if (first_above == v.size()) return std::nullopt;

  std::size_t end = first_above;
  while (end < v.size() && v[end] > w.v_trig) ++end;
  std::size_t peak = first_above;
  for (std::size_t i = first_above; i < end; ++i)
    if (v[i] > v[peak]) peak = i;

  const double level = w.v_rest + (v[peak] - w.v_rest) / 2.0;
  auto cross_time = [&](std::size_t below, std::size_t above) {
    // linear interpolation of the level crossing between two samples
    const double f = (level - v[below]) / (v[above] - v[below]);
    return t[below] + f * (t[above] - t[below]);
  };

  std::size_t i = peak;
  while (i > 0 && v[i - 1] >= level) --i;
  const double t_rise = i == 0 ? t[0] : cross_time(i - 1, i);

  std::size_t j = peak;
  while (j + 1 < v.size() && v[j + 1] >= level) ++j;
  const double t_fall = j + 1 == v.size() ? t.back() : cross_time(j + 1, j);

  return t_fall - t_rise;
}

// Largest input-arrival skew that still yields the XOR table, scanned to the
// given resolution under the assumption that larger skews only degrade the
// gate. Returns 0 if the table is not XOR even at zero skew.
inline double max_xor_skew(const Topology& t, const SimConfig& cfg,
                           const MembraneConstants& mc, const InputDrive& drive = {},
                           double resolution = 10e-6, double cap = 5e-3) {
  if (classify_gate(truth_table(t, cfg, mc, drive, 0.0)) != GateKind::Xor) return 0.0;

  const NodeId a = t.label("input_a");
  const NodeId b = t.label("input_b");
  const NodeId probe = t.label("output_probe");
  // only the both-inputs entry depends on the skew
  auto both_output = [&](double skew) {
    std::vector<Stimulus> stims{drive.stimulus(a, 0.0), drive.stimulus(b, skew)};
    return detect_output(simulate(t, stims, cfg, mc), probe);
  };

  double lo = 0.0, hi = cap;  // XOR holds at lo; assume broken at hi
  if (!both_output(cap)) return cap;
  while (hi - lo > resolution) {
    const double mid = (lo + hi) / 2.0;
    (both_output(mid) ? hi : lo) = mid;
  }
  return lo;
}

// CSV: `r_vertex_ohm,gate` per sample, then one `# boundary` comment line per
// refined boundary giving the bracketing samples and the gates on each side.
inline void write_regime_csv(const RegimeReport& rep, std::ostream& out) {
  out << "r_vertex_ohm,gate\n";
  char buf[32];
  for (const RegimeSample& s : rep.samples) {
    std::snprintf(buf, sizeof buf, "%.12g", s.r_vertex);
    out << buf << ',' << gate_name(s.gate) << '\n';
  }
  for (std::size_t i = 0; i + 1 < rep.intervals.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", rep.intervals[i].r_high);
    out << "# boundary " << buf << ' ' << gate_name(rep.intervals[i].gate) << ' '
        << gate_name(rep.intervals[i + 1].gate) << '\n';
  }
}

}  // namespace dsim
