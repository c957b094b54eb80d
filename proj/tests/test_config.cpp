#include <doctest.h>

#include <string>

#include "fdcancel/config.hpp"

using namespace fdcancel;
using namespace fdcancel::experiments;

namespace {

const char* kBaseIni = R"(# delay sweep against one strong coupling path
[scenario]
name = bench
sweep = si_path_delay
sweep_values_ns = 0:150:10
seeds = 1, 2, 3
taps_per_branch = 32
step_size = 0.5
digital_delay_ns = auto

[ofdm]
num_symbols = 40
constellation = qpsk

[phase_noise]
kind = wiener
tx = on
rx = on

[noise]
floor_dbm = -90

[path.1]
gain_db = -50
delay_ns = 0

[curve.1]
label = single
kind = single_tap
ref_delays_ns = 0

[curve.2]
label = four_ref
kind = multi_tap
ref_delays_ns = 0, 33.333, 66.666, 99.999
tx_power_dbm = 10
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("ini text populates a full scenario") {
  const ScenarioPreset p = config::parse_text(kBaseIni);
  CHECK(p.name == "bench");
  CHECK(p.sweep == SweepVariable::SiPathDelay);
  REQUIRE(p.sweep_values_ns.size() == 16u);
  CHECK(p.sweep_values_ns.front() == 0.0);
  CHECK(p.sweep_values_ns.back() == 150.0);
  CHECK(p.seeds == std::vector<uint64_t>{1, 2, 3});
  CHECK(p.taps_per_branch == 32);
  CHECK_FALSE(p.digital_delay_ns.has_value());
  CHECK(p.ofdm.num_symbols == 40);
  CHECK(p.ofdm.fft_size == 2048);  // untouched default
  CHECK(p.phase_noise.kind == impairments::PhaseNoiseKind::Wiener);
  CHECK(p.tx_phase_noise);
  CHECK(p.rx_phase_noise);
  CHECK(p.noise.floor_dbm == -90.0);
  REQUIRE(p.si_channel.paths.size() == 1u);
  CHECK(p.si_channel.paths[0].gain_db == -50.0);
  REQUIRE(p.curves.size() == 2u);
  CHECK(p.curves[0].label == "single");
  CHECK(p.curves[0].kind == CancellerKind::SingleTap);
  CHECK(p.curves[1].kind == CancellerKind::MultiTap);
  REQUIRE(p.curves[1].ref_delays_ns.size() == 4u);
  CHECK(p.curves[1].tx_power_dbm == 10.0);
  CHECK(p.curves[1].phase_noise);
}

TEST_CASE("explicit digital delay and comma lists") {
  std::string ini = kBaseIni;
  const std::string needle = "digital_delay_ns = auto";
  ini.replace(ini.find(needle), needle.size(), "digital_delay_ns = 120");
  const ScenarioPreset p = config::parse_text(ini);
  REQUIRE(p.digital_delay_ns.has_value());
  CHECK(*p.digital_delay_ns == 120.0);

  const ScenarioPreset q = config::parse_text(R"(
[scenario]
sweep_values_ns = 5, 40, 90
[path.1]
gain_db = -50
[curve.1]
kind = single_tap
ref_delays_ns = 0
)");
  CHECK(q.name == "custom");
  CHECK(q.sweep_values_ns == std::vector<double>{5.0, 40.0, 90.0});
  CHECK(q.seeds == std::vector<uint64_t>{1, 2, 3, 4});  // default
  CHECK(q.curves[0].label == "1");                   // from section name
}

TEST_CASE("strictness: typos and malformed input are errors") {
  auto patched = [](const std::string& from, const std::string& to) {
    std::string ini = kBaseIni;
    ini.replace(ini.find(from), from.size(), to);
    return ini;
  };

  // unknown key in a known section
  CHECK_THROWS_WITH_AS(config::parse_text(patched("step_size", "step_sise")),
                       doctest::Contains("unknown key 'step_sise'"), ConfigError);
  // unknown section
  CHECK_THROWS_WITH_AS(config::parse_text(patched("[noise]", "[noize]")),
                       doctest::Contains("unknown section [noize]"), ConfigError);
  // duplicate key
  CHECK_THROWS_WITH_AS(
      config::parse_text(patched("taps_per_branch = 32",
                                 "taps_per_branch = 32\ntaps_per_branch = 16")),
      doctest::Contains("duplicate key"), ConfigError);
  // malformed numbers and flags
  CHECK_THROWS_WITH_AS(config::parse_text(patched("floor_dbm = -90", "floor_dbm = cold")),
                       doctest::Contains("bad number"), ConfigError);
  CHECK_THROWS_WITH_AS(config::parse_text(patched("tx = on", "tx = maybe")),
                       doctest::Contains("bad flag"), ConfigError);
  CHECK_THROWS_WITH_AS(config::parse_text(patched("kind = wiener", "kind = flicker")),
                       doctest::Contains("phase noise kind"), ConfigError);
  // structural problems
  CHECK_THROWS_WITH_AS(config::parse_text("[scenario\nname = x\n"),
                       doctest::Contains("bad section header"), ConfigError);
  CHECK_THROWS_WITH_AS(config::parse_text("name = orphan\n"),
                       doctest::Contains("expected 'key = value'"), ConfigError);
  CHECK_THROWS_WITH_AS(config::parse_text("[scenario]\n[curve.1]\nkind = single_tap\n"),
                       doctest::Contains("needs at least one [path.N]"), ConfigError);
  // range syntax
  CHECK_THROWS_WITH_AS(config::parse_text(patched("0:150:10", "0:150")),
                       doctest::Contains("start:stop:step"), ConfigError);
  CHECK_THROWS_WITH_AS(config::parse_text(patched("0:150:10", "0:150:0")),
                       doctest::Contains("must be > 0"), ConfigError);
  // semantic validation still runs after parsing
  CHECK_THROWS_WITH_AS(config::parse_text(patched("step_size = 0.5", "step_size = 2.5")),
                       doctest::Contains("step_size"), ConfigError);
}

TEST_CASE("manifest json round-trips the resolved scenario") {
  SweepResult res;
  res.preset = preset_fig5();
  res.preset.digital_delay_ns = 120.0;
  res.wall_seconds = 1.5;
  const std::string text = config::manifest_text(res, "fig5.csv");
  CHECK(text.find("\"fdcancel-manifest\"") != std::string::npos);
  CHECK(text.find("\"fig5.csv\"") != std::string::npos);

  const ScenarioPreset back = config::parse_text(text);
  CHECK(back.name == "fig5");
  CHECK(back.sweep_values_ns == res.preset.sweep_values_ns);
  CHECK(back.seeds == res.preset.seeds);
  REQUIRE(back.digital_delay_ns.has_value());
  CHECK(*back.digital_delay_ns == 120.0);
  REQUIRE(back.curves.size() == res.preset.curves.size());
  for (size_t i = 0; i < back.curves.size(); ++i) {
    CHECK(back.curves[i].label == res.preset.curves[i].label);
    CHECK(back.curves[i].kind == res.preset.curves[i].kind);
    CHECK(back.curves[i].ref_delays_ns == res.preset.curves[i].ref_delays_ns);
    CHECK(back.curves[i].tx_power_dbm == res.preset.curves[i].tx_power_dbm);
  }

  // unset digital delay survives as null
  SweepResult res2;
  res2.preset = preset_fig6();
  const ScenarioPreset back2 = config::parse_text(config::manifest_text(res2, "x.csv"));
  CHECK_FALSE(back2.digital_delay_ns.has_value());
  CHECK(back2.curves[3].phase_noise == false);

  // broken manifests surface as config errors
  CHECK_THROWS_AS(config::parse_text("{ not json"), ConfigError);
  CHECK_THROWS_AS(config::parse_text("{\"preset\": {\"name\": \"x\"}}"), ConfigError);
}

}  // TEST_SUITE
