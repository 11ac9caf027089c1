// Active-membrane segment model: area-normalized membrane constants, lumped
// per-segment electrical parameters derived from geometry, and the four-phase
// channel state machine with its switched sodium/potassium source currents.
//
// All quantities are SI base units throughout (V, A, F, Ohm, s, m and the
// per-area combinations F/m^2, S/m^2, A/m^2, Ohm*m).
#pragma once

#include <numbers>
#include <stdexcept>

namespace dsim {

// Hysteresis band below the rest potential at which a recovering segment
// re-arms. Prevents a re-trigger while the voltage transits the trigger
// threshold on its way down; reached within a few leak time constants.
inline constexpr double rearm_tolerance = 2e-3;  // V

struct MembraneConstants {
  double c_mem = 1.0e-2;     // capacitance per area, F/m^2       (1 uF/cm^2)
  double g_leak = 3.0;       // leak conductance per area, S/m^2  (0.3 mS/cm^2)
  double rho_axial = 0.157;  // axial resistivity, Ohm*m          (15.7 Ohm*cm)
  double j_na = 2.69;        // sodium current density, A/m^2     (269 uA/cm^2)
  double j_k = 0.608;        // potassium current density, A/m^2  (60.8 uA/cm^2)
  double v_rest = -70e-3;    // equilibrium potential, V
  double v_trig = -54e-3;    // sodium turn-on threshold, V
  double v_max = 48e-3;      // sodium shut-off voltage, V
  double v_min = -96e-3;     // potassium shut-off voltage, V

  void validate() const {
    if (!(c_mem > 0.0)) throw std::invalid_argument("c_mem must be positive");
    if (!(g_leak > 0.0)) throw std::invalid_argument("g_leak must be positive");
    if (!(rho_axial > 0.0)) throw std::invalid_argument("rho_axial must be positive");
    if (!(j_na > 0.0)) throw std::invalid_argument("j_na must be positive");
    if (!(j_k > 0.0)) throw std::invalid_argument("j_k must be positive");
    if (!(j_na > j_k))
      throw std::invalid_argument("j_na must exceed j_k (sodium surge must dominate)");
    if (!(v_min < v_rest && v_rest < v_trig && v_trig < v_max))
      throw std::invalid_argument("voltages must satisfy v_min < v_rest < v_trig < v_max");
  }

  bool operator==(const MembraneConstants&) const = default;
};

struct SegmentGeometry {
  double length = 500e-6;   // m
  double diameter = 1e-6;   // m

  void validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
    if (!(diameter > 0.0)) throw std::invalid_argument("diameter must be positive");
  }

  bool operator==(const SegmentGeometry&) const = default;
};

// Lumped circuit values for one segment. The source-enable flags model
// locally silenced membrane: a disabled segment is purely passive.
struct SegmentElectrical {
  double cap = 0.0;       // membrane capacitance, F
  double r_leak = 0.0;    // leak resistance to rest, Ohm
  double r_series = 0.0;  // axial series resistance, Ohm
  double i_na = 0.0;      // sodium source amplitude, A
  double i_k = 0.0;       // potassium source amplitude, A
  bool na_enabled = true;
  bool k_enabled = true;

  void validate() const {
    if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
    if (!(r_leak > 0.0)) throw std::invalid_argument("r_leak must be positive");
    if (!(r_series > 0.0)) throw std::invalid_argument("r_series must be positive");
    if (!(i_na >= 0.0)) throw std::invalid_argument("i_na must be non-negative");
    if (!(i_k >= 0.0)) throw std::invalid_argument("i_k must be non-negative");
  }

  bool operator==(const SegmentElectrical&) const = default;
};

// Excitation phase of a segment. The cycle is strictly
// Resting -> Depolarizing -> Repolarizing -> Recovering -> Resting.
enum class Phase { Resting, Depolarizing, Repolarizing, Recovering };

// Lumps a cylindrical membrane patch into circuit values. Lateral area sets
// capacitance, leak and source amplitudes; the cross-section sets the axial
// series resistance.
inline SegmentElectrical derive_electrical(const SegmentGeometry& geom,
                                           const MembraneConstants& mc) {
  geom.validate();
  mc.validate();
  const double area = std::numbers::pi * geom.diameter * geom.length;
  const double cross_section = std::numbers::pi * geom.diameter * geom.diameter / 4.0;
  SegmentElectrical e;
  e.cap = mc.c_mem * area;
  e.r_leak = 1.0 / (mc.g_leak * area);
  e.r_series = mc.rho_axial * geom.length / cross_section;
  e.i_na = mc.j_na * area;
  e.i_k = mc.j_k * area;
  return e;
}

// Advances the channel state given the voltage before and after one
// integration step. Trigger detection needs the rising crossing
// (v_prev < v_trig <= v_now); the other transitions are level tests on the
// post-step voltage. A sodium-disabled segment never leaves Resting.
inline Phase step_channel_state(Phase s, double v_prev, double v_now,
                                const SegmentElectrical& seg,
                                const MembraneConstants& mc) {
  switch (s) {
    case Phase::Resting:
      if (seg.na_enabled && v_prev < mc.v_trig && v_now >= mc.v_trig)
        return Phase::Depolarizing;
      return s;
    case Phase::Depolarizing:
      return v_now >= mc.v_max ? Phase::Repolarizing : s;
    case Phase::Repolarizing:
      return v_now <= mc.v_min ? Phase::Recovering : s;
    case Phase::Recovering:
      return v_now >= mc.v_rest - rearm_tolerance ? Phase::Resting : s;
  }
  return s;
}

// Membrane source current for the given phase; positive raises the voltage.
// Potassium keeps discharging after sodium shuts off at v_max.
inline double source_current(Phase s, const SegmentElectrical& seg) {
  const double na = seg.na_enabled ? seg.i_na : 0.0;
  const double k = seg.k_enabled ? seg.i_k : 0.0;
  switch (s) {
    case Phase::Depolarizing:
      return na - k;
    case Phase::Repolarizing:
      return -k;
    case Phase::Resting:
    case Phase::Recovering:
      return 0.0;
  }
  return 0.0;
}

}  // namespace dsim
