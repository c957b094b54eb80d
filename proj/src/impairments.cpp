#include "fdcancel/impairments.hpp"

#include <cmath>

#include "fdcancel/rng.hpp"

namespace fdcancel::impairments {

namespace {

inline cplx unit_phasor(double phi) {
#if defined(__GLIBC__)
  double s, c;
  ::sincos(phi, &s, &c);
  return {c, s};
#else
  return {std::cos(phi), std::sin(phi)};
#endif
}

}  // namespace

PhaseNoiseTrace gen_phase_trace(const PhaseNoiseModel& model, size_t length,
                                uint64_t seed) {
  if (model.sigma_eps_sq < 0.0)
    throw ConfigError("phase_noise: sigma_eps_sq must be >= 0");
  if (model.model_rate_hz <= 0.0)
    throw ConfigError("phase_noise: model_rate_hz must be > 0");

  PhaseNoiseTrace trace;
  trace.rate_hz = model.model_rate_hz;
  trace.phi.assign(length, 0.0);
  if (model.kind == PhaseNoiseKind::None || length == 0) return trace;

  GaussianRng rng(seed);
  const double sd = std::sqrt(model.sigma_eps_sq);
  double acc = 0.0;
  for (size_t k = 0; k < length; ++k) {
    acc += sd * rng.gaussian();
    trace.phi[k] = acc;
  }
  return trace;
}

SampleBuffer apply_phase_noise(const SampleBuffer& x, const PhaseNoiseTrace& trace) {
  if (x.samples.size() != trace.phi.size())
    throw ContractError("apply_phase_noise: length mismatch");
  if (x.rate_hz != trace.rate_hz)
    throw ContractError("apply_phase_noise: rate mismatch");
  SampleBuffer out = x;
  for (size_t k = 0; k < out.samples.size(); ++k)
    out.samples[k] *= unit_phasor(trace.phi[k]);
  return out;
}

SampleBuffer add_awgn(const SampleBuffer& x, const NoiseModel& noise, uint64_t seed) {
  SampleBuffer out = x;
  GaussianRng rng(seed);
  const double sd = std::sqrt(dbm_to_mw(noise.floor_dbm));
  for (auto& v : out.samples) v += sd * rng.complex_gaussian();
  return out;
}

double diff_process_variance(const PhaseNoiseModel& model, double delta_s) {
  if (model.kind == PhaseNoiseKind::None) return 0.0;
  return model.sigma_eps_sq * std::abs(delta_s) * model.model_rate_hz;
}

double coherence_weight(const PhaseNoiseModel& model, double delta_s) {
  return std::exp(-0.5 * diff_process_variance(model, delta_s));
}

}  // namespace fdcancel::impairments
