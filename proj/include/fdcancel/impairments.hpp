#pragma once

#include <cstdint>
#include <vector>

#include "fdcancel/sample_buffer.hpp"

namespace fdcancel::impairments {

enum class PhaseNoiseKind { Wiener, None };

// Random-walk oscillator phase. sigma_eps_sq is the variance of the
// per-sample increment at model_rate_hz; scaling to other rates or lags
// goes through diff_process_variance.
struct PhaseNoiseModel {
  double sigma_eps_sq = 8.5095e-5;
  double model_rate_hz = kSimRateHz;
  PhaseNoiseKind kind = PhaseNoiseKind::Wiener;
};

struct PhaseNoiseTrace {
  std::vector<double> phi;
  double rate_hz = 0.0;
};

enum class NoiseChain { RxChain, RefChain };

struct NoiseModel {
  double floor_dbm = -90.0;
  NoiseChain applies_to = NoiseChain::RxChain;
};

// Cumulative-sum phase walk of the given length at the model rate.
PhaseNoiseTrace gen_phase_trace(const PhaseNoiseModel& model, size_t length,
                                uint64_t seed);

// x[k] * exp(j phi[k]). Rates and lengths must match.
SampleBuffer apply_phase_noise(const SampleBuffer& x, const PhaseNoiseTrace& trace);

// Adds circularly symmetric white noise at floor_dbm mean power.
SampleBuffer add_awgn(const SampleBuffer& x, const NoiseModel& noise, uint64_t seed);

// Variance of phi(t) - phi(t - delta): sigma_eps_sq * |delta| * model_rate.
double diff_process_variance(const PhaseNoiseModel& model, double delta_s);

// E[exp(j(phi(t) - phi(t - delta)))] = exp(-var/2); 1.0 for kind None.
double coherence_weight(const PhaseNoiseModel& model, double delta_s);

}  // namespace fdcancel::impairments
