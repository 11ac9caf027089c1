#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsim/cli.hpp"

using namespace dsim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("dsim_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const TempDir& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir.path / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_probe_events(const std::string& events_csv, const std::string& kind) {
  int n = 0;
  std::istringstream lines(events_csv);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("7,", 0) == 0 && line.find(kind) != std::string::npos) ++n;
  return n;
}

constexpr const char* xor_point = "topology.r_vertex = 211.5625 MOhm\n";

}  // namespace

TEST_CASE("derive prints the nominal parameter table") {
  const CliResult r = run_cli({"derive"});
  CHECK(r.code == 0);
  CHECK(r.out.find("15.708 pF") != std::string::npos);
  CHECK(r.out.find("212.21 MOhm") != std::string::npos);
  CHECK(r.out.find("99.949 MOhm") != std::string::npos);
  CHECK(r.out.find("4.2254 nA") != std::string::npos);
  CHECK(r.out.find("955.04 pA") != std::string::npos);
  CHECK(r.out.find("-70 mV") != std::string::npos);
}

TEST_CASE("derive reflects geometry overrides") {
  TempDir dir("derive");
  const fs::path cfg = write_config(dir, "double.cfg", "geometry.length = 1000 um\n");
  const CliResult r = run_cli({"derive", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("31.416 pF") != std::string::npos);
  CHECK(r.out.find("199.9 MOhm") != std::string::npos);

  SUBCASE("custom current density recomputes the source amplitude") {
    // 3 A/m2 over the 1.5708e-9 m2 lateral area gives 4.7124 nA
    const fs::path dense = write_config(dir, "dense.cfg", "membrane.j_na = 300 uA/cm2\n");
    const CliResult d = run_cli({"derive", "--config", dense.string()});
    CHECK(d.code == 0);
    CHECK(d.out.find("4.7124 nA") != std::string::npos);
  }
}

TEST_CASE("run writes waveform and event CSVs") {
  TempDir dir("run");
  const std::string base = std::string(xor_point) + "sim.t_end = 20 ms\n";

  SUBCASE("single input produces a full output pulse") {
    const fs::path cfg = write_config(dir, "a.cfg", base + "stimulus.inputs = a\n");
    const CliResult r = run_cli({"run", "--config", cfg.string(), "--out",
                                 (dir.path / "out_a").string()});
    REQUIRE(r.code == 0);
    const std::string waves = slurp(dir.path / "out_a" / "waveforms.csv");
    CHECK(waves.rfind("time_s,0,1,", 0) == 0);
    const std::string events = slurp(dir.path / "out_a" / "events.csv");
    CHECK(count_probe_events(events, "depolarize") == 1);
    CHECK(count_probe_events(events, "repolarize") == 1);
  }

  SUBCASE("colliding inputs leave the output silent") {
    const fs::path cfg = write_config(dir, "ab.cfg", base + "stimulus.inputs = both\n");
    const CliResult r = run_cli({"run", "--config", cfg.string(), "--out",
                                 (dir.path / "out_ab").string()});
    REQUIRE(r.code == 0);
    const std::string events = slurp(dir.path / "out_ab" / "events.csv");
    CHECK(count_probe_events(events, "depolarize") == 0);
  }

  SUBCASE("no stimulus leaves an empty event log") {
    const fs::path cfg = write_config(dir, "none.cfg", base + "stimulus.inputs = none\n");
    const CliResult r = run_cli({"run", "--config", cfg.string(), "--out",
                                 (dir.path / "out_none").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir.path / "out_none" / "events.csv") == "node,time_s,transition\n");
  }

  SUBCASE("identical runs produce byte-identical CSVs") {
    const fs::path cfg = write_config(dir, "det.cfg", base);
    REQUIRE(run_cli({"run", "--config", cfg.string(), "--out",
                     (dir.path / "d1").string()}).code == 0);
    REQUIRE(run_cli({"run", "--config", cfg.string(), "--out",
                     (dir.path / "d2").string()}).code == 0);
    CHECK(slurp(dir.path / "d1" / "waveforms.csv") == slurp(dir.path / "d2" / "waveforms.csv"));
    CHECK(slurp(dir.path / "d1" / "events.csv") == slurp(dir.path / "d2" / "events.csv"));
  }
}

TEST_CASE("truth-table command") {
  TempDir dir("table");
  const fs::path cfg = write_config(dir, "xor.cfg", xor_point);
  const CliResult r = run_cli({"truth-table", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("a b | out") != std::string::npos);
  CHECK(r.out.find("gate: XOR") != std::string::npos);

  SUBCASE("sources-off flag turns the vertex passive") {
    const fs::path low = write_config(dir, "low.cfg", "topology.r_vertex = 50 MOhm\n");
    const CliResult off =
        run_cli({"truth-table", "--config", low.string(), "--sources-off"});
    CHECK(off.code == 0);
    CHECK(off.out.find("gate: AND") != std::string::npos);
  }

  SUBCASE("a large skew restores transmission of the first pulse") {
    const CliResult skewed =
        run_cli({"truth-table", "--config", cfg.string(), "--skew", "10"});
    CHECK(skewed.code == 0);
    CHECK(skewed.out.find("gate: OR") != std::string::npos);
  }
}

TEST_CASE("sweep command writes the regime CSV") {
  TempDir dir("sweep");
  const CliResult r = run_cli({"sweep", "--out", dir.path.string(), "--r-range",
                               "180MOhm:240MOhm", "--step", "30MOhm"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("regimes:") != std::string::npos);
  CHECK(r.out.find("XOR") != std::string::npos);
  const std::string csv = slurp(dir.path / "sweep.csv");
  CHECK(csv.rfind("r_vertex_ohm,gate", 0) == 0);
  CHECK(csv.find("# boundary") != std::string::npos);
}

TEST_CASE("exit codes follow the contract") {
  TempDir dir("codes");

  SUBCASE("missing config file") {
    const CliResult r = run_cli({"derive", "--config", (dir.path / "absent.cfg").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
  }

  SUBCASE("invalid config value") {
    const fs::path cfg = write_config(dir, "bad.cfg", "membrane.v_trig = -100 mV\n");
    const CliResult r = run_cli({"truth-table", "--config", cfg.string()});
    CHECK(r.code == 2);
  }

  SUBCASE("numerical blow-up") {
    // a step far beyond the stability bound, kicked at t = 0
    const fs::path cfg = write_config(dir, "blowup.cfg",
                                      "sim.dt = 5 ms\n"
                                      "sim.t_end = 50 ms\n"
                                      "stimulus.start = 0 ms\n");
    const CliResult r = run_cli({"run", "--config", cfg.string(), "--out",
                                 (dir.path / "out").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("blow-up") != std::string::npos);
  }

  SUBCASE("unknown flag") {
    CHECK(run_cli({"derive", "--frobnicate"}).code == 2);
  }

  SUBCASE("missing subcommand") {
    CHECK(run_cli({}).code == 2);
  }

  SUBCASE("help exits cleanly") {
    const CliResult r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("derive") != std::string::npos);
  }

  SUBCASE("bad r-range") {
    TempDir out("badrange");
    CHECK(run_cli({"sweep", "--out", out.path.string(), "--r-range", "oops"}).code == 2);
  }
}
