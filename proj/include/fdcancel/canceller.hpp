#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdcancel/impairments.hpp"
#include "fdcancel/sample_buffer.hpp"

namespace fdcancel::canceller {

// Norm floor below which the adaptive update is skipped.
inline constexpr double kNormFloor = 1e-12;

struct MaskVector {
  std::vector<uint8_t> entries;  // one flag per tap, 1 = adaptable
};

// The canceller itself never shifts data; alignment delays are applied to
// the streams upstream. digital_delay_ns and the reference geometry enter
// only through the tap-mask rule.
struct CancellerConfig {
  int n_refs = 1;
  int taps_per_branch = 32;
  std::vector<double> ref_delays_ns{0.0};
  double digital_delay_ns = 0.0;
  double step_size = 0.5;
  double sample_period_s = 1.0 / kBaseRateHz;
  double ref_spacing_s = 1.0 / kBaseRateHz;
  // Overrides the mask rule when set (size n_refs, each of taps_per_branch).
  std::optional<std::vector<MaskVector>> mask_override;
  bool keep_residual = false;
};

// Tap masks for the multi-reference architecture. With tap indices counted
// from 1, the window is centred on d1 = ceil(digital_delay / T_s): half a
// branch spacing each side when the spacing exceeds two samples, the pair
// {d1, d1+1} at exactly two samples, and the single tap d1 otherwise.
// Every branch gets the same mask, clamped to [1, taps_per_branch].
std::vector<MaskVector> compute_masks(const CancellerConfig& cfg);

struct FilterState {
  std::vector<cplx> weights;               // branch-major, n_refs * taps
  std::vector<std::vector<cplx>> history;  // per branch, newest first
};

// Concatenation of the masked branch histories (newest first), branch-major.
std::vector<cplx> build_input(const std::vector<std::vector<cplx>>& histories,
                              const std::vector<MaskVector>& masks);

struct NlmsResult {
  cplx y_hat;
  cplx error;
};

// One normalized LMS iteration: y_hat = w^H u, e = d - y_hat,
// w += mu * u * conj(e) / ||u||^2 (skipped below kNormFloor).
NlmsResult nlms_step(FilterState& state, const std::vector<cplx>& u, cplx d,
                     double mu);

struct CancellationReport {
  double residual_power_dbm = 0.0;
  std::optional<double> theory_power_dbm;
  bool converged = false;
  size_t samples_used = 0;
  std::map<std::string, double> realized_delays_ns;
  std::vector<double> branch_weight_energy;
  std::vector<cplx> final_weights;
  std::vector<cplx> residual;  // filled when cfg.keep_residual
};

// Classic single-receiver canceller: one reference stream, all taps free.
CancellationReport run_single_tap(const SampleBuffer& y_i,
                                  const SampleBuffer& y_ref,
                                  const CancellerConfig& cfg);

// Multi-reference canceller with masked branch filters.
CancellationReport run_multi_tap(const SampleBuffer& y_i,
                                 const std::vector<SampleBuffer>& refs,
                                 const CancellerConfig& cfg);

// Post-cancellation residual floor from oscillator decoherence:
// 10*log10(P_I*(1-K^2) + N) with K the coherence weight at lag delta_ir_s.
double residual_theory(double p_i_dbm, const impairments::PhaseNoiseModel& model,
                       double delta_ir_s, double n_dbm);
double residual_theory_from_k(double p_i_dbm, double k, double n_dbm);

}  // namespace fdcancel::canceller
