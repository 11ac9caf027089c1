// Scenario configuration: a line-oriented `section.key = value` format with
// unit suffixes, defaults matching the nominal segment parameters, and a
// normalized dump that parses back to an identical configuration.
#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dsim/engine.hpp"
#include "dsim/logic.hpp"
#include "dsim/network.hpp"
#include "dsim/segment.hpp"

namespace dsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line_, int col_, const std::string& message)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ", col " +
                                           std::to_string(col_) + ": " + message
                                     : message),
        line(line_), col(col_) {}

  int line;  // 0 when the error is not tied to one line
  int col;
};

enum class InputSelect { None, A, B, Both };

struct ScenarioConfig {
  MembraneConstants membrane{};
  SegmentGeometry geometry{};

  struct TopologyBlock {
    int branch_len = 6;
    int out_len = 3;
    std::optional<double> r_vertex{};  // nullopt: nominal segment r_series
    bool vertex_sources = true;

    bool operator==(const TopologyBlock&) const = default;
  } topology;

  struct StimulusBlock {
    Stimulus::Kind kind = Stimulus::Kind::CurrentInjection;
    InputSelect inputs = InputSelect::A;
    double amplitude = 1e-9;  // A
    double start = 1e-3;      // s
    double duration = 0.5e-3; // s
    double skew = 0.0;        // s, extra delay of input_b when both fire

    bool operator==(const StimulusBlock&) const = default;
  } stimulus;

  SimConfig sim{};

  bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

enum class Quantity {
  Voltage, Current, Capacitance, Resistance, Time, Length,
  SpecificCapacitance, SpecificConductance, CurrentDensity, Resistivity,
};

// Multiplier to SI for a unit token, or nothing if the token is not a unit of
// this quantity. Micro may be written u or the micro sign; Ohm may be spelled
// out or written as an omega.
inline std::optional<double> unit_factor(Quantity q, std::string_view u) {
  using Table = std::vector<std::pair<std::string_view, double>>;
  static const std::map<Quantity, Table> tables = {
      {Quantity::Voltage, {{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}, {"µV", 1e-6}}},
      {Quantity::Current,
       {{"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}, {"µA", 1e-6}, {"nA", 1e-9}, {"pA", 1e-12}}},
      {Quantity::Capacitance,
       {{"F", 1.0}, {"uF", 1e-6}, {"µF", 1e-6}, {"nF", 1e-9}, {"pF", 1e-12}}},
      {Quantity::Resistance,
       {{"Ohm", 1.0}, {"ohm", 1.0}, {"Ω", 1.0}, {"Ω", 1.0},
        {"kOhm", 1e3}, {"kΩ", 1e3}, {"kΩ", 1e3},
        {"MOhm", 1e6}, {"MΩ", 1e6}, {"MΩ", 1e6},
        {"GOhm", 1e9}, {"GΩ", 1e9}, {"GΩ", 1e9}}},
      {Quantity::Time,
       {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}}},
      {Quantity::Length,
       {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"µm", 1e-6}, {"nm", 1e-9}}},
      {Quantity::SpecificCapacitance,
       {{"F/m2", 1.0}, {"F/cm2", 1e4}, {"uF/cm2", 1e-2}, {"µF/cm2", 1e-2},
        {"nF/cm2", 1e-5}}},
      {Quantity::SpecificConductance,
       {{"S/m2", 1.0}, {"S/cm2", 1e4}, {"mS/cm2", 10.0}, {"uS/cm2", 1e-2},
        {"µS/cm2", 1e-2}}},
      {Quantity::CurrentDensity,
       {{"A/m2", 1.0}, {"A/cm2", 1e4}, {"mA/cm2", 10.0}, {"uA/cm2", 1e-2},
        {"µA/cm2", 1e-2}}},
      {Quantity::Resistivity,
       {{"Ohm.m", 1.0}, {"Ohm.cm", 1e-2}, {"ohm.cm", 1e-2}, {"Ω.cm", 1e-2},
        {"kOhm.cm", 10.0}}},
  };
  for (const auto& [token, factor] : tables.at(q))
    if (token == u) return factor;
  return std::nullopt;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// One `key = value` assignment with enough position info for errors.
struct Assignment {
  std::string_view key;
  std::string_view value;
  int line = 0;
  int key_col = 0;
  int value_col = 0;

  [[noreturn]] void fail(const std::string& message, int col) const {
    throw ConfigError(line, col, message);
  }

  double quantity(Quantity q) const {
    double magnitude = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [rest, ec] = std::from_chars(first, last, magnitude);
    if (ec != std::errc() || rest == first)
      fail("expected a number for '" + std::string(key) + "'", value_col);
    std::string_view unit = trim(std::string_view(rest, static_cast<std::size_t>(last - rest)));
    if (unit.empty()) return magnitude;  // bare numbers are SI
    if (auto factor = unit_factor(q, unit)) return magnitude * *factor;
    fail("unknown unit '" + std::string(unit) + "' for '" + std::string(key) + "'",
         value_col + static_cast<int>(unit.data() - value.data()));
  }

  int integer() const {
    int out = 0;
    auto [rest, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || rest != value.data() + value.size())
      fail("expected an integer for '" + std::string(key) + "'", value_col);
    return out;
  }

  bool on_off() const {
    if (value == "on" || value == "true") return true;
    if (value == "off" || value == "false") return false;
    fail("expected on/off for '" + std::string(key) + "'", value_col);
  }

  [[noreturn]] void unknown_choice(std::string_view choices) const {
    fail("'" + std::string(key) + "' must be one of: " + std::string(choices), value_col);
  }
};

}  // namespace detail

// Parses a scenario configuration. Omitted keys keep the defaults; unknown
// keys, malformed lines, bad units, and duplicate keys are rejected with
// line/column positions, and invariant violations are named by key.
inline ScenarioConfig parse_config(std::string_view text) {
  using detail::Assignment;
  using detail::Quantity;
  using detail::trim;

  ScenarioConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    std::string_view body = raw.substr(0, std::min(raw.find('#'), raw.size()));
    if (trim(body).empty()) continue;

    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, 1, "expected 'section.key = value'");

    Assignment a;
    a.line = line_no;
    a.key = trim(body.substr(0, eq));
    a.value = trim(body.substr(eq + 1));
    a.key_col = static_cast<int>(a.key.data() - raw.data()) + 1;
    a.value_col =
        a.value.empty() ? static_cast<int>(eq) + 2
                        : static_cast<int>(a.value.data() - raw.data()) + 1;

    if (a.key.empty()) throw ConfigError(line_no, 1, "missing key before '='");
    if (a.value.empty()) a.fail("missing value for '" + std::string(a.key) + "'", a.value_col);
    if (!seen.insert(std::string(a.key)).second)
      a.fail("duplicate key '" + std::string(a.key) + "'", a.key_col);

    if (a.key == "membrane.c_mem") c.membrane.c_mem = a.quantity(Quantity::SpecificCapacitance);
    else if (a.key == "membrane.g_leak") c.membrane.g_leak = a.quantity(Quantity::SpecificConductance);
    else if (a.key == "membrane.rho_axial") c.membrane.rho_axial = a.quantity(Quantity::Resistivity);
    else if (a.key == "membrane.j_na") c.membrane.j_na = a.quantity(Quantity::CurrentDensity);
    else if (a.key == "membrane.j_k") c.membrane.j_k = a.quantity(Quantity::CurrentDensity);
    else if (a.key == "membrane.v_rest") c.membrane.v_rest = a.quantity(Quantity::Voltage);
    else if (a.key == "membrane.v_trig") c.membrane.v_trig = a.quantity(Quantity::Voltage);
    else if (a.key == "membrane.v_max") c.membrane.v_max = a.quantity(Quantity::Voltage);
    else if (a.key == "membrane.v_min") c.membrane.v_min = a.quantity(Quantity::Voltage);
    else if (a.key == "geometry.length") c.geometry.length = a.quantity(Quantity::Length);
    else if (a.key == "geometry.diameter") c.geometry.diameter = a.quantity(Quantity::Length);
    else if (a.key == "topology.branch_len") c.topology.branch_len = a.integer();
    else if (a.key == "topology.out_len") c.topology.out_len = a.integer();
    else if (a.key == "topology.r_vertex") {
      if (a.value == "nominal") c.topology.r_vertex.reset();
      else c.topology.r_vertex = a.quantity(Quantity::Resistance);
    } else if (a.key == "topology.vertex_sources") c.topology.vertex_sources = a.on_off();
    else if (a.key == "stimulus.kind") {
      if (a.value == "current") c.stimulus.kind = Stimulus::Kind::CurrentInjection;
      else if (a.value == "trigger") c.stimulus.kind = Stimulus::Kind::ForceTrigger;
      else a.unknown_choice("current, trigger");
    } else if (a.key == "stimulus.inputs") {
      if (a.value == "none") c.stimulus.inputs = InputSelect::None;
      else if (a.value == "a") c.stimulus.inputs = InputSelect::A;
      else if (a.value == "b") c.stimulus.inputs = InputSelect::B;
      else if (a.value == "both") c.stimulus.inputs = InputSelect::Both;
      else a.unknown_choice("none, a, b, both");
    } else if (a.key == "stimulus.amplitude") c.stimulus.amplitude = a.quantity(Quantity::Current);
    else if (a.key == "stimulus.start") c.stimulus.start = a.quantity(Quantity::Time);
    else if (a.key == "stimulus.duration") c.stimulus.duration = a.quantity(Quantity::Time);
    else if (a.key == "stimulus.skew") c.stimulus.skew = a.quantity(Quantity::Time);
    else if (a.key == "sim.dt") c.sim.dt = a.quantity(Quantity::Time);
    else if (a.key == "sim.t_end") c.sim.t_end = a.quantity(Quantity::Time);
    else if (a.key == "sim.record_stride") c.sim.record_stride = a.integer();
    else if (a.key == "sim.integrator") {
      if (a.value == "euler") c.sim.integrator = Integrator::ForwardEuler;
      else if (a.value == "rk4") c.sim.integrator = Integrator::RungeKutta4;
      else a.unknown_choice("euler, rk4");
    } else a.fail("unknown key '" + std::string(a.key) + "'", a.key_col);
  }

  auto named = [](const char* section, auto&& check) {
    try {
      check();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, 0, std::string(section) + ": " + e.what());
    }
  };
  named("membrane", [&] { c.membrane.validate(); });
  named("geometry", [&] { c.geometry.validate(); });
  named("sim", [&] { c.sim.validate(); });
  named("topology", [&] {
    if (c.topology.branch_len < 2) throw std::invalid_argument("branch_len must be at least 2");
    if (c.topology.out_len < 1) throw std::invalid_argument("out_len must be at least 1");
    if (c.topology.r_vertex && !(*c.topology.r_vertex > 0.0))
      throw std::invalid_argument("r_vertex must be positive");
  });
  named("stimulus", [&] {
    if (!(c.stimulus.amplitude >= 0.0))
      throw std::invalid_argument("amplitude must be non-negative");
    if (!(c.stimulus.start >= 0.0)) throw std::invalid_argument("start must be non-negative");
    if (!(c.stimulus.duration > 0.0)) throw std::invalid_argument("duration must be positive");
    if (!(c.stimulus.skew >= 0.0)) throw std::invalid_argument("skew must be non-negative");
  });
  return c;
}

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace detail

// Normalized dump: every key in canonical order, SI units, exact values.
inline std::string dump_config(const ScenarioConfig& c) {
  using detail::format_double;
  std::string out;
  auto put = [&](std::string_view key, const std::string& value, std::string_view unit = {}) {
    out += key;
    out += " = ";
    out += value;
    if (!unit.empty()) {
      out += ' ';
      out += unit;
    }
    out += '\n';
  };
  auto putq = [&](std::string_view key, double v, std::string_view unit) {
    put(key, format_double(v), unit);
  };

  putq("membrane.c_mem", c.membrane.c_mem, "F/m2");
  putq("membrane.g_leak", c.membrane.g_leak, "S/m2");
  putq("membrane.rho_axial", c.membrane.rho_axial, "Ohm.m");
  putq("membrane.j_na", c.membrane.j_na, "A/m2");
  putq("membrane.j_k", c.membrane.j_k, "A/m2");
  putq("membrane.v_rest", c.membrane.v_rest, "V");
  putq("membrane.v_trig", c.membrane.v_trig, "V");
  putq("membrane.v_max", c.membrane.v_max, "V");
  putq("membrane.v_min", c.membrane.v_min, "V");
  putq("geometry.length", c.geometry.length, "m");
  putq("geometry.diameter", c.geometry.diameter, "m");
  put("topology.branch_len", std::to_string(c.topology.branch_len));
  put("topology.out_len", std::to_string(c.topology.out_len));
  if (c.topology.r_vertex) putq("topology.r_vertex", *c.topology.r_vertex, "Ohm");
  else put("topology.r_vertex", "nominal");
  put("topology.vertex_sources", c.topology.vertex_sources ? "on" : "off");
  put("stimulus.kind",
      c.stimulus.kind == Stimulus::Kind::CurrentInjection ? "current" : "trigger");
  switch (c.stimulus.inputs) {
    case InputSelect::None: put("stimulus.inputs", "none"); break;
    case InputSelect::A: put("stimulus.inputs", "a"); break;
    case InputSelect::B: put("stimulus.inputs", "b"); break;
    case InputSelect::Both: put("stimulus.inputs", "both"); break;
  }
  putq("stimulus.amplitude", c.stimulus.amplitude, "A");
  putq("stimulus.start", c.stimulus.start, "s");
  putq("stimulus.duration", c.stimulus.duration, "s");
  putq("stimulus.skew", c.stimulus.skew, "s");
  putq("sim.dt", c.sim.dt, "s");
  putq("sim.t_end", c.sim.t_end, "s");
  put("sim.record_stride", std::to_string(c.sim.record_stride));
  put("sim.integrator", c.sim.integrator == Integrator::ForwardEuler ? "euler" : "rk4");
  return out;
}

// Derived bridges from a parsed scenario to the simulation building blocks.

inline SegmentElectrical nominal_segment(const ScenarioConfig& c) {
  return derive_electrical(c.geometry, c.membrane);
}

inline MergeSpec merge_spec(const ScenarioConfig& c) {
  MergeSpec s;
  s.branch_len = c.topology.branch_len;
  s.out_len = c.topology.out_len;
  s.segment = nominal_segment(c);
  s.r_vertex = c.topology.r_vertex;
  s.vertex_sources = c.topology.vertex_sources;
  return s;
}

inline InputDrive input_drive(const ScenarioConfig& c) {
  return {c.stimulus.kind, c.stimulus.amplitude, c.stimulus.start, c.stimulus.duration};
}

inline std::vector<Stimulus> scenario_stimuli(const ScenarioConfig& c, const Topology& t) {
  const InputDrive d = input_drive(c);
  const bool use_a = c.stimulus.inputs == InputSelect::A || c.stimulus.inputs == InputSelect::Both;
  const bool use_b = c.stimulus.inputs == InputSelect::B || c.stimulus.inputs == InputSelect::Both;
  std::vector<Stimulus> out;
  if (use_a) out.push_back(d.stimulus(t.label("input_a"), 0.0));
  if (use_b) out.push_back(d.stimulus(t.label("input_b"), use_a ? c.stimulus.skew : 0.0));
  return out;
}

}  // namespace dsim
