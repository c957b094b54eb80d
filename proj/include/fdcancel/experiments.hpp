#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdcancel/canceller.hpp"
#include "fdcancel/channel.hpp"
#include "fdcancel/impairments.hpp"
#include "fdcancel/signal.hpp"

namespace fdcancel::experiments {

enum class CancellerKind { SingleTap, MultiTap };

// How a curve derives its reference-tap delays at each sweep point.
enum class RefDelayPolicy {
  FixedDelays,     // use ref_delays_ns as given
  HalfSweepValue,  // one reference at half the sweep value
  SweepValue,      // one reference at the sweep value
};

struct CurveSpec {
  std::string label;
  CancellerKind kind = CancellerKind::SingleTap;
  RefDelayPolicy ref_policy = RefDelayPolicy::FixedDelays;
  std::vector<double> ref_delays_ns{0.0};
  double tx_power_dbm = 20.0;
  bool phase_noise = true;  // curve-level master switch for both oscillators
};

enum class SweepVariable {
  SiPathDelay,  // delay of the first channel path
  PathSpread,   // delay of the second path relative to the first
  None,
};

struct ScenarioPreset {
  std::string name;
  signal::OfdmConfig ofdm;  // tx_power_dbm comes from the curve
  impairments::PhaseNoiseModel phase_noise;
  bool tx_phase_noise = true;
  bool rx_phase_noise = true;
  impairments::NoiseModel noise;  // same floor on direct and reference chains
  channel::MultipathChannel si_channel;
  SweepVariable sweep = SweepVariable::SiPathDelay;
  std::vector<double> sweep_values_ns;
  std::vector<uint64_t> seeds{1, 2, 3, 4};
  int taps_per_branch = 32;
  double step_size = 0.5;
  // Digital alignment delay on the direct stream. Unset = per sweep point,
  // the smallest delay covering the curve's reference delays that keeps
  // every interference path at a causal, interpolable tap lag once both
  // sides land on their sample grids.
  std::optional<double> digital_delay_ns;
  std::vector<CurveSpec> curves;
  int jobs = 1;
};

struct SweepRow {
  std::string curve;
  double sweep_value_ns = 0.0;
  double realized_delay_ns = 0.0;  // swept delay quantized to the sim clock
  std::vector<double> residual_dbm_seeds;  // NaN where the filter diverged
  double residual_dbm_mean = 0.0;          // mean over seeds in linear power
  std::optional<double> theory_dbm;
  bool converged = false;  // every seed converged
};

struct SweepResult {
  ScenarioPreset preset;
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
};

// Delay sweep of a one-path channel, single-reference canceller, with the
// closed-form overlay, at two interference powers.
ScenarioPreset preset_fig2();
// Two-path channel spread sweep comparing reference placements.
ScenarioPreset preset_fig3();
// One-path delay sweep comparing single- against multi-reference banks.
ScenarioPreset preset_fig5();
// Two-path spread sweep, multi-reference banks, with a noise-free-oscillator
// companion curve.
ScenarioPreset preset_fig6();

std::vector<std::string> preset_names();
ScenarioPreset preset_by_name(const std::string& name);

void validate(const ScenarioPreset& preset);

// Full Monte-Carlo sweep. Deterministic for a given preset regardless of
// jobs; rows ordered curve-major then sweep value.
SweepResult run_scenario(const ScenarioPreset& preset);

struct TheoryRow {
  std::string curve;
  double sweep_value_ns = 0.0;
  double delta_ir_ns = 0.0;  // realized decoherence lag
  double theory_dbm = 0.0;
};

// Closed-form residual for every single-reference curve of a one-path
// delay-sweep preset. Throws NotApplicableError otherwise.
std::vector<TheoryRow> theory_overlay(const ScenarioPreset& preset);

void write_csv(const SweepResult& result, std::ostream& os);
void write_theory_csv(const std::vector<TheoryRow>& rows, std::ostream& os);

}  // namespace fdcancel::experiments
