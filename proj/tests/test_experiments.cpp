#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fdcancel/experiments.hpp"

using namespace fdcancel;
using namespace fdcancel::experiments;

namespace {

// Small single-point scenario for fast end-to-end checks.
ScenarioPreset micro_preset() {
  ScenarioPreset p = preset_fig2();
  p.name = "micro";
  p.sweep_values_ns = {0.0};
  p.seeds = {1};
  p.ofdm.num_symbols = 20;
  p.curves.resize(1);
  return p;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("built-in scenario shapes") {
  CHECK(preset_names() == std::vector<std::string>{"fig2", "fig3", "fig5", "fig6"});
  CHECK_THROWS_AS(preset_by_name("fig4"), ConfigError);

  const ScenarioPreset f2 = preset_fig2();
  CHECK(f2.si_channel.paths.size() == 1u);
  CHECK(f2.sweep == SweepVariable::SiPathDelay);
  CHECK(f2.sweep_values_ns.size() == 16u);
  CHECK(f2.sweep_values_ns.back() == 150.0);
  REQUIRE(f2.curves.size() == 2u);
  CHECK(f2.curves[0].tx_power_dbm == 20.0);
  CHECK(f2.curves[1].tx_power_dbm == 10.0);
  validate(f2);

  const ScenarioPreset f3 = preset_fig3();
  CHECK(f3.si_channel.paths.size() == 2u);
  CHECK(f3.sweep == SweepVariable::PathSpread);
  REQUIRE(f3.curves.size() == 3u);
  CHECK(f3.curves[0].ref_policy == RefDelayPolicy::FixedDelays);
  CHECK(f3.curves[1].ref_policy == RefDelayPolicy::HalfSweepValue);
  CHECK(f3.curves[2].ref_policy == RefDelayPolicy::SweepValue);
  validate(f3);

  const ScenarioPreset f5 = preset_fig5();
  REQUIRE(f5.curves.size() == 6u);
  CHECK(f5.curves[2].kind == CancellerKind::MultiTap);
  CHECK(f5.curves[2].ref_delays_ns.size() == 4u);
  CHECK(f5.curves[2].ref_delays_ns[1] == doctest::Approx(100.0 / 3.0));
  validate(f5);

  const ScenarioPreset f6 = preset_fig6();
  REQUIRE(f6.curves.size() == 4u);
  CHECK(f6.curves[3].phase_noise == false);
  validate(f6);
}

TEST_CASE("preset validation rejects bad shapes") {
  ScenarioPreset p = preset_fig2();
  p.seeds.clear();
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = preset_fig2();
  p.sweep = SweepVariable::PathSpread;  // one-path channel
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = preset_fig2();
  p.curves[0].ref_delays_ns = {50.0, 50.0};
  p.curves[0].kind = CancellerKind::MultiTap;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = preset_fig2();
  p.curves[0].ref_delays_ns = {0.0, 10.0, 40.0};  // uneven spacing
  p.curves[0].kind = CancellerKind::MultiTap;
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = preset_fig2();
  p.phase_noise.model_rate_hz = kBaseRateHz;  // wrong clock
  CHECK_THROWS_AS(validate(p), ConfigError);

  p = preset_fig2();
  p.curves[0].label = "has,comma";
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("closed-form overlay table") {
  const std::vector<TheoryRow> rows = theory_overlay(preset_fig2());
  CHECK(rows.size() == 32u);
  // matched point sits at the combined noise floor
  CHECK(rows[0].sweep_value_ns == 0.0);
  CHECK(rows[0].theory_dbm == doctest::Approx(-90.0).epsilon(1e-5));
  // a 150 ns lag decoheres the receive walk; the transmit walk rides with
  // the waveform and is aligned away by the filter
  const TheoryRow& last = rows[15];
  CHECK(last.sweep_value_ns == 150.0);
  CHECK(last.delta_ir_ns == doctest::Approx(146.484375).epsilon(1e-9));
  const double var = 8.5095e-5 * 18.0;  // wideband-clock walk, 18 samples
  const double k = std::exp(-0.5 * var);
  const double expect =
      10.0 * std::log10(1e-3 * (1.0 - k * k) + 1e-9 * (1.0 + 1e-5));
  CHECK(last.theory_dbm == doctest::Approx(expect).epsilon(1e-9));

  CHECK_THROWS_AS(theory_overlay(preset_fig3()), NotApplicableError);
}

TEST_CASE("matched-delay run lands on the noise floor") {
  const SweepResult res = run_scenario(micro_preset());
  REQUIRE(res.rows.size() == 1u);
  const SweepRow& row = res.rows[0];
  CHECK(row.converged);
  CHECK(row.realized_delay_ns == 0.0);
  REQUIRE(row.theory_dbm.has_value());
  CHECK(*row.theory_dbm == doctest::Approx(-90.0).epsilon(1e-5));
  // noise-limited apart from adaptation excess
  CHECK(row.residual_dbm_mean < -86.5);
  CHECK(row.residual_dbm_mean > -90.5);
}

TEST_CASE("csv layout and determinism across runs and jobs") {
  ScenarioPreset p = micro_preset();
  p.curves.push_back(p.curves[0]);
  p.curves[1].label = "two_ref";
  p.curves[1].kind = CancellerKind::MultiTap;
  p.curves[1].ref_delays_ns = {0.0, 100.0};

  const SweepResult a = run_scenario(p);
  std::ostringstream csv_a;
  write_csv(a, csv_a);

  ScenarioPreset p2 = p;
  p2.jobs = 2;
  const SweepResult b = run_scenario(p2);
  std::ostringstream csv_b;
  write_csv(b, csv_b);

  const std::string sa = csv_a.str();
  CHECK(sa == csv_b.str());

  std::istringstream lines(sa);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "sweep_value_ns,residual_dbm_mean,residual_dbm_seed_1,"
        "theory_dbm,realized_delay_ns,curve,converged");
  std::string row1, row2;
  std::getline(lines, row1);
  std::getline(lines, row2);
  CHECK(row1.find("single_-30dbm,1") != std::string::npos);
  // no closed form for the multi-reference curve: empty field
  CHECK(row2.find(",,") != std::string::npos);
  CHECK(row2.find("two_ref,1") != std::string::npos);

  // the masked bank still cancels a matched direct path
  CHECK(b.rows[1].residual_dbm_mean < -80.0);
}

TEST_CASE("interference power scales the decohered residual") {
  ScenarioPreset p = preset_fig2();
  p.name = "micro2";
  p.seeds = {1};
  p.ofdm.num_symbols = 30;
  p.sweep_values_ns = {0.0, 97.65625};
  const SweepResult res = run_scenario(p);
  REQUIRE(res.rows.size() == 4u);
  const double strong_matched = res.rows[0].residual_dbm_mean;
  const double strong_offset = res.rows[1].residual_dbm_mean;
  const double weak_matched = res.rows[2].residual_dbm_mean;
  const double weak_offset = res.rows[3].residual_dbm_mean;

  // floor-limited when matched, so both powers tie
  CHECK(weak_matched <= strong_matched + 0.2);
  // decoherence-limited when offset: 10 dB of tx power shows up directly
  CHECK(weak_offset == doctest::Approx(strong_offset - 10.0).epsilon(0.02));
  CHECK(res.rows[1].theory_dbm.has_value());
  CHECK(std::abs(strong_offset - *res.rows[1].theory_dbm) < 3.0);
}

}  // TEST_SUITE
