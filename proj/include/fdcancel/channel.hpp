#pragma once

#include <vector>

#include "fdcancel/sample_buffer.hpp"

namespace fdcancel::channel {

// One propagation path or analog tap: complex gain plus a delay that is
// quantized to the buffer's sample grid when applied.
struct PathSpec {
  double gain_db = 0.0;
  double phase_rad = 0.0;
  double delay_ns = 0.0;
};

struct MultipathChannel {
  std::vector<PathSpec> paths;
};

// Analog delay lines feeding the reference receivers, one tap per branch.
struct ReferenceTapBank {
  std::vector<PathSpec> taps;
};

// Nearest-sample quantization of a delay on a clock.
long long delay_to_samples(double delay_ns, double rate_hz);
double realized_delay_ns(double delay_ns, double rate_hz);

// Scale by the complex gain and shift by the quantized delay (zero fill).
SampleBuffer apply_path(const SampleBuffer& x, const PathSpec& path);

// Sum of apply_path over all paths, in listed order.
SampleBuffer apply_channel(const SampleBuffer& x, const MultipathChannel& ch);

// Pure sample shift at the buffer's own rate; models the digital
// alignment delay applied to the direct-receiver stream.
SampleBuffer digital_delay(const SampleBuffer& x, double delay_ns);

void validate(const MultipathChannel& ch);
void validate(const ReferenceTapBank& bank);

}  // namespace fdcancel::channel
