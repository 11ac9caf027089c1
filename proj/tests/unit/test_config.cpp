#include <doctest.h>

#include <random>

#include "dsim/config.hpp"

using namespace dsim;

TEST_CASE("empty config yields the nominal scenario") {
  const ScenarioConfig c = parse_config("");
  CHECK(c == ScenarioConfig{});

  const SegmentElectrical seg = nominal_segment(c);
  CHECK(seg.cap == doctest::Approx(15.7e-12).epsilon(0.005));
  CHECK(seg.r_leak == doctest::Approx(212e6).epsilon(0.005));
  CHECK(seg.r_series == doctest::Approx(99.9e6).epsilon(0.005));
  CHECK(seg.i_na == doctest::Approx(4.22e-9).epsilon(0.005));
  CHECK(seg.i_k == doctest::Approx(0.955e-9).epsilon(0.005));

  const MergeSpec spec = merge_spec(c);
  CHECK(spec.branch_len == 6);
  CHECK(spec.out_len == 3);
  CHECK(!spec.r_vertex.has_value());
  CHECK(spec.vertex_sources);
}

TEST_CASE("single overrides leave everything else at defaults") {
  const ScenarioConfig c = parse_config("topology.r_vertex = 200 MOhm\n");
  CHECK(c.topology.r_vertex == 200e6);
  ScenarioConfig expect;
  expect.topology.r_vertex = 200e6;
  CHECK(c == expect);
}

TEST_CASE("unit suffixes convert to SI") {
  const char* text =
      "membrane.v_trig = -54 mV\n"
      "membrane.c_mem = 1 uF/cm2\n"
      "membrane.g_leak = 0.3 mS/cm2\n"
      "membrane.rho_axial = 15.7 Ohm.cm\n"
      "membrane.j_na = 269 uA/cm2\n"
      "geometry.length = 500 um\n"
      "stimulus.amplitude = 1 nA\n"
      "stimulus.duration = 0.5 ms\n"
      "sim.dt = 1 us\n";
  const ScenarioConfig c = parse_config(text);
  CHECK(c.membrane.v_trig == doctest::Approx(-54e-3));
  CHECK(c.membrane.c_mem == doctest::Approx(1e-2));
  CHECK(c.membrane.g_leak == doctest::Approx(3.0));
  CHECK(c.membrane.rho_axial == doctest::Approx(0.157));
  CHECK(c.membrane.j_na == doctest::Approx(2.69));
  CHECK(c.geometry.length == doctest::Approx(500e-6));
  CHECK(c.stimulus.amplitude == doctest::Approx(1e-9));
  CHECK(c.stimulus.duration == doctest::Approx(0.5e-3));
  CHECK(c.sim.dt == doctest::Approx(1e-6));

  SUBCASE("micro sign and omega spellings") {
    const ScenarioConfig u = parse_config(
        "geometry.diameter = 2 µm\n"
        "topology.r_vertex = 200 MΩ\n");
    CHECK(u.geometry.diameter == doctest::Approx(2e-6));
    CHECK(u.topology.r_vertex == doctest::Approx(200e6));
  }

  SUBCASE("bare numbers are SI") {
    const ScenarioConfig b = parse_config("topology.r_vertex = 2e8\n");
    CHECK(b.topology.r_vertex == 2e8);
  }
}

TEST_CASE("comments and blank lines are ignored") {
  const ScenarioConfig c = parse_config(
      "# scenario\n"
      "\n"
      "  topology.out_len = 4   # longer output chain\n"
      "\n");
  CHECK(c.topology.out_len == 4);
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("unknown key") {
    try {
      parse_config("membrane.c_mem = 1 uF/cm2\ntopology.wat = 3\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line == 2);
      CHECK(e.col == 1);
      CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }
  }

  SUBCASE("missing equals") {
    try {
      parse_config("sim.dt 1 us\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line == 1);
    }
  }

  SUBCASE("bad number") {
    CHECK_THROWS_WITH_AS(parse_config("sim.dt = fast\n"), doctest::Contains("number"),
                         ConfigError);
  }

  SUBCASE("unknown unit") {
    try {
      parse_config("sim.dt = 1 furlong\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("furlong") != std::string::npos);
      CHECK(e.col > 9);
    }
  }

  SUBCASE("wrong unit for the quantity") {
    CHECK_THROWS_AS(parse_config("sim.dt = 1 mV\n"), ConfigError);
  }

  SUBCASE("duplicate key") {
    CHECK_THROWS_WITH_AS(parse_config("sim.dt = 1 us\nsim.dt = 2 us\n"),
                         doctest::Contains("duplicate"), ConfigError);
  }

  SUBCASE("bad enum value") {
    CHECK_THROWS_WITH_AS(parse_config("stimulus.inputs = c\n"),
                         doctest::Contains("one of"), ConfigError);
  }
}

TEST_CASE("invariant violations are named by key") {
  try {
    parse_config("membrane.v_trig = -100 mV\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("membrane") != std::string::npos);
    CHECK(what.find("v_trig") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_config("topology.branch_len = 1\n"),
                       doctest::Contains("branch_len"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("stimulus.duration = 0 ms\n"),
                       doctest::Contains("duration"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("sim.record_stride = 0\n"),
                       doctest::Contains("record_stride"), ConfigError);
}

TEST_CASE("normalized dump round-trips exactly") {
  SUBCASE("defaults") {
    const ScenarioConfig c = parse_config("");
    const std::string dump = dump_config(c);
    CHECK(parse_config(dump) == c);
    CHECK(dump_config(parse_config(dump)) == dump);
  }

  SUBCASE("explicit vertex resistance") {
    const ScenarioConfig c = parse_config("topology.r_vertex = 211.5625 MOhm\n");
    const ScenarioConfig back = parse_config(dump_config(c));
    CHECK(back == c);
    CHECK(*back.topology.r_vertex == *c.topology.r_vertex);
  }

  SUBCASE("randomized scenarios") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> unit(0.2, 5.0);
    std::uniform_int_distribution<int> small(2, 9);
    for (int trial = 0; trial < 25; ++trial) {
      ScenarioConfig c;
      c.membrane.c_mem = 1e-2 * unit(rng);
      c.membrane.j_na = 2.69 * unit(rng);
      c.membrane.j_k = c.membrane.j_na / 4.0;
      c.geometry.length = 500e-6 * unit(rng);
      c.topology.branch_len = small(rng);
      c.topology.out_len = small(rng);
      c.topology.r_vertex = 1e8 * unit(rng);
      c.topology.vertex_sources = trial % 2 == 0;
      c.stimulus.inputs = trial % 3 == 0 ? InputSelect::Both : InputSelect::B;
      c.stimulus.skew = 1e-4 * unit(rng);
      c.sim.dt = 1e-6 * unit(rng);
      c.sim.record_stride = small(rng);
      c.sim.integrator = trial % 2 == 0 ? Integrator::RungeKutta4 : Integrator::ForwardEuler;
      const ScenarioConfig back = parse_config(dump_config(c));
      CHECK(back == c);
    }
  }
}

TEST_CASE("scenario bridges to simulation inputs") {
  const ScenarioConfig c = parse_config(
      "stimulus.inputs = both\n"
      "stimulus.skew = 0.2 ms\n"
      "stimulus.kind = trigger\n");
  const Topology t = build_merge_topology(merge_spec(c));
  const std::vector<Stimulus> stims = scenario_stimuli(c, t);
  REQUIRE(stims.size() == 2);
  CHECK(stims[0].target == t.label("input_a"));
  CHECK(stims[0].kind == Stimulus::Kind::ForceTrigger);
  CHECK(stims[1].target == t.label("input_b"));
  CHECK(stims[1].start == doctest::Approx(1e-3 + 0.2e-3));

  const ScenarioConfig none = parse_config("stimulus.inputs = none\n");
  CHECK(scenario_stimuli(none, t).empty());

  const ScenarioConfig only_b = parse_config(
      "stimulus.inputs = b\n"
      "stimulus.skew = 0.2 ms\n");
  const std::vector<Stimulus> sb = scenario_stimuli(only_b, t);
  REQUIRE(sb.size() == 1);
  CHECK(sb[0].target == t.label("input_b"));
  CHECK(sb[0].start == doctest::Approx(1e-3));  // skew applies only when both fire
}
