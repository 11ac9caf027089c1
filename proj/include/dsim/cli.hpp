// Command-line front end: scenario parsing, the derive/run/truth-table/sweep
// workflows, and CSV artifact output.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsim/config.hpp"
#include "dsim/engine.hpp"
#include "dsim/logic.hpp"
#include "dsim/network.hpp"

namespace dsim {

namespace detail {

inline std::string format_si(double value, std::string_view unit) {
  static constexpr struct { double scale; const char* prefix; } steps[] = {
      {1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""},
      {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"}, {1e-15, "f"},
  };
  char buf[48];
  if (value == 0.0) {
    std::snprintf(buf, sizeof buf, "0 %.*s", (int)unit.size(), unit.data());
    return buf;
  }
  const double mag = std::abs(value);
  for (const auto& s : steps)
    if (mag >= s.scale || s.scale == 1e-15) {
      std::snprintf(buf, sizeof buf, "%.5g %s%.*s", value / s.scale, s.prefix,
                    (int)unit.size(), unit.data());
      return buf;
    }
  return buf;
}

inline ScenarioConfig load_config(const std::string& path) {
  if (path.empty()) return parse_config("");
  std::ifstream in(path);
  if (!in) throw ConfigError(0, 0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// "lo:hi" resistance range; each side a bare ohm value or number + unit
inline std::pair<double, double> parse_r_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError(0, 0, "--r-range expects '<lo>:<hi>'");
  Assignment a;
  a.key = "--r-range";
  a.value = trim(std::string_view(text).substr(0, colon));
  double lo = a.quantity(Quantity::Resistance);
  a.value = trim(std::string_view(text).substr(colon + 1));
  double hi = a.quantity(Quantity::Resistance);
  if (!(lo > 0.0) || !(hi >= lo))
    throw ConfigError(0, 0, "--r-range must be ascending and positive");
  return {lo, hi};
}

inline double parse_resistance(const std::string& text, const char* flag) {
  Assignment a;
  a.key = flag;
  a.value = trim(text);
  return a.quantity(Quantity::Resistance);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(0, 0, "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace detail

inline void cmd_derive(const ScenarioConfig& c, std::ostream& out) {
  using detail::format_si;
  const SegmentElectrical seg = nominal_segment(c);
  out << "segment geometry\n";
  out << "  length     " << format_si(c.geometry.length, "m") << '\n';
  out << "  diameter   " << format_si(c.geometry.diameter, "m") << '\n';
  out << "membrane constants (SI)\n";
  out << "  c_mem      " << c.membrane.c_mem << " F/m2\n";
  out << "  g_leak     " << c.membrane.g_leak << " S/m2\n";
  out << "  rho_axial  " << c.membrane.rho_axial << " Ohm.m\n";
  out << "  j_na       " << c.membrane.j_na << " A/m2\n";
  out << "  j_k        " << c.membrane.j_k << " A/m2\n";
  out << "derived electrical parameters\n";
  out << "  cap        " << format_si(seg.cap, "F") << '\n';
  out << "  r_leak     " << format_si(seg.r_leak, "Ohm") << '\n';
  out << "  r_series   " << format_si(seg.r_series, "Ohm") << '\n';
  out << "  i_na       " << format_si(seg.i_na, "A") << '\n';
  out << "  i_k        " << format_si(seg.i_k, "A") << '\n';
  out << "thresholds\n";
  out << "  v_rest     " << format_si(c.membrane.v_rest, "V") << '\n';
  out << "  v_trig     " << format_si(c.membrane.v_trig, "V") << '\n';
  out << "  v_max      " << format_si(c.membrane.v_max, "V") << '\n';
  out << "  v_min      " << format_si(c.membrane.v_min, "V") << '\n';
}

inline void cmd_run(const ScenarioConfig& c, const std::filesystem::path& out_dir,
                    std::ostream& out) {
  const Topology t = build_merge_topology(merge_spec(c));
  const WaveformSet w = simulate(t, scenario_stimuli(c, t), c.sim, c.membrane);
  std::filesystem::create_directories(out_dir);
  std::ostringstream waves, events;
  write_waveforms_csv(w, waves);
  write_events_csv(w, events);
  detail::write_file(out_dir / "waveforms.csv", waves.str());
  detail::write_file(out_dir / "events.csv", events.str());
  out << "wrote " << (out_dir / "waveforms.csv").string() << " (" << w.times.size()
      << " samples, " << w.voltages.size() << " nodes)\n";
  out << "wrote " << (out_dir / "events.csv").string() << " (" << w.events.size()
      << " events)\n";
}

inline void cmd_truth_table(const ScenarioConfig& c, std::ostream& out) {
  const Topology t = build_merge_topology(merge_spec(c));
  const TruthTable tt = truth_table(t, c.sim, c.membrane, input_drive(c), c.stimulus.skew);
  out << "a b | out\n";
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      out << a << ' ' << b << " |   " << (tt.at(a, b) ? 1 : 0) << '\n';
  out << "gate: " << gate_name(classify_gate(tt)) << '\n';
}

inline void cmd_sweep(const ScenarioConfig& c, double r_lo, double r_hi, double step,
                      const std::filesystem::path& out_dir, std::ostream& out) {
  SweepParams p;
  p.base = merge_spec(c);
  p.r_lo = r_lo;
  p.r_hi = r_hi;
  p.coarse_step = step;
  p.sim = c.sim;
  p.mc = c.membrane;
  p.drive = input_drive(c);
  p.skew = c.stimulus.skew;
  const RegimeReport rep = sweep_vertex_resistance(p);
  std::filesystem::create_directories(out_dir);
  std::ostringstream csv;
  write_regime_csv(rep, csv);
  detail::write_file(out_dir / "sweep.csv", csv.str());
  out << "wrote " << (out_dir / "sweep.csv").string() << " (" << rep.samples.size()
      << " samples)\n";
  out << "regimes:\n";
  char buf[96];
  for (const RegimeInterval& iv : rep.intervals) {
    std::snprintf(buf, sizeof buf, "  [%.6g, %.6g] MOhm  %s", iv.r_low / 1e6, iv.r_high / 1e6,
                  std::string(gate_name(iv.gate)).c_str());
    out << buf << '\n';
  }
}

inline int cli_main(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"active-dendrite network simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string r_range = "10MOhm:400MOhm";
  std::string step = "10MOhm";
  double skew_ms = 0.0;
  bool sources_off = false;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", config_path, "scenario configuration file");
    if (with_out) cmd->add_option("--out", out_dir, "output directory for CSV files");
  };

  CLI::App* derive = app.add_subcommand("derive", "print derived segment parameters");
  add_common(derive, false);

  CLI::App* run = app.add_subcommand("run", "simulate one scenario and write CSVs");
  add_common(run, true);
  run->add_flag("--sources-off", sources_off, "disable the vertex segment sources");
  CLI::Option* run_skew = run->add_option("--skew", skew_ms, "input_b delay in ms");

  CLI::App* table = app.add_subcommand("truth-table", "print the realized truth table");
  add_common(table, false);
  table->add_flag("--sources-off", sources_off, "disable the vertex segment sources");
  CLI::Option* table_skew = table->add_option("--skew", skew_ms, "input_b delay in ms");

  CLI::App* sweep = app.add_subcommand("sweep", "classify gates across vertex resistances");
  add_common(sweep, true);
  sweep->add_option("--r-range", r_range, "vertex resistance range '<lo>:<hi>'");
  sweep->add_option("--step", step, "coarse grid step (ohms unless suffixed)");
  sweep->add_flag("--sources-off", sources_off, "disable the vertex segment sources");
  CLI::Option* sweep_skew = sweep->add_option("--skew", skew_ms, "input_b delay in ms");

  try {
    std::vector<const char*> argv{"dsim"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out, err);
      return rc == 0 ? 0 : 2;
    }

    ScenarioConfig c = detail::load_config(config_path);
    if (sources_off) c.topology.vertex_sources = false;
    auto apply_skew = [&](CLI::Option* opt) {
      if (opt->count() > 0) {
        if (skew_ms < 0.0) throw ConfigError(0, 0, "--skew must be non-negative");
        c.stimulus.skew = skew_ms * 1e-3;
      }
    };

    if (derive->parsed()) {
      cmd_derive(c, out);
    } else if (run->parsed()) {
      apply_skew(run_skew);
      cmd_run(c, out_dir, out);
    } else if (table->parsed()) {
      apply_skew(table_skew);
      cmd_truth_table(c, out);
    } else if (sweep->parsed()) {
      apply_skew(sweep_skew);
      auto [lo, hi] = detail::parse_r_range(r_range);
      cmd_sweep(c, lo, hi, detail::parse_resistance(step, "--step"), out_dir, out);
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SimulationError& e) {
    err << "simulation failed: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dsim
