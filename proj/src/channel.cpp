#include "fdcancel/channel.hpp"

#include <cmath>

namespace fdcancel::channel {

long long delay_to_samples(double delay_ns, double rate_hz) {
  if (rate_hz <= 0.0) throw ContractError("delay_to_samples: bad rate");
  return std::llround(delay_ns * 1e-9 * rate_hz);
}

double realized_delay_ns(double delay_ns, double rate_hz) {
  return static_cast<double>(delay_to_samples(delay_ns, rate_hz)) / rate_hz * 1e9;
}

SampleBuffer apply_path(const SampleBuffer& x, const PathSpec& path) {
  if (path.delay_ns < 0.0) throw ConfigError("path: delay_ns must be >= 0");
  const long long d = delay_to_samples(path.delay_ns, x.rate_hz);
  const cplx g = std::sqrt(db_to_lin(path.gain_db)) *
                 cplx(std::cos(path.phase_rad), std::sin(path.phase_rad));
  SampleBuffer out;
  out.rate_hz = x.rate_hz;
  out.samples.assign(x.samples.size(), cplx(0.0, 0.0));
  for (size_t k = static_cast<size_t>(d); k < x.samples.size(); ++k)
    out.samples[k] = g * x.samples[k - static_cast<size_t>(d)];
  return out;
}

SampleBuffer apply_channel(const SampleBuffer& x, const MultipathChannel& ch) {
  if (ch.paths.empty()) throw ConfigError("channel: needs at least one path");
  SampleBuffer out;
  out.rate_hz = x.rate_hz;
  out.samples.assign(x.samples.size(), cplx(0.0, 0.0));
  for (const PathSpec& p : ch.paths) {
    const SampleBuffer y = apply_path(x, p);
    for (size_t k = 0; k < out.samples.size(); ++k) out.samples[k] += y.samples[k];
  }
  return out;
}

SampleBuffer digital_delay(const SampleBuffer& x, double delay_ns) {
  if (delay_ns < 0.0) throw ConfigError("digital_delay: delay_ns must be >= 0");
  const long long d = delay_to_samples(delay_ns, x.rate_hz);
  SampleBuffer out;
  out.rate_hz = x.rate_hz;
  out.samples.assign(x.samples.size(), cplx(0.0, 0.0));
  for (size_t k = static_cast<size_t>(d); k < x.samples.size(); ++k)
    out.samples[k] = x.samples[k - static_cast<size_t>(d)];
  return out;
}

void validate(const MultipathChannel& ch) {
  if (ch.paths.empty()) throw ConfigError("channel: needs at least one path");
  for (size_t i = 0; i < ch.paths.size(); ++i) {
    if (ch.paths[i].delay_ns < 0.0)
      throw ConfigError("channel: path delays must be >= 0");
    if (i > 0 && ch.paths[i].delay_ns < ch.paths[i - 1].delay_ns)
      throw ConfigError("channel: path delays must be sorted ascending");
  }
}

void validate(const ReferenceTapBank& bank) {
  if (bank.taps.empty()) throw ConfigError("tap bank: needs at least one tap");
  for (size_t i = 0; i < bank.taps.size(); ++i) {
    if (bank.taps[i].delay_ns < 0.0)
      throw ConfigError("tap bank: delays must be >= 0");
    if (i > 0 && bank.taps[i].delay_ns <= bank.taps[i - 1].delay_ns)
      throw ConfigError("tap bank: delays must be strictly increasing");
  }
}

}  // namespace fdcancel::channel
