#pragma once

#include <cstdint>
#include <vector>

#include "fdcancel/sample_buffer.hpp"

namespace fdcancel::signal {

enum class Constellation { Qpsk, Qam16 };

struct OfdmConfig {
  int fft_size = 2048;
  int num_symbols = 200;
  int cp_len = 144;
  // Occupied grid width including the nulled DC bin.
  int occupied_subcarriers = 1333;
  int upsample_factor = 4;
  Constellation constellation = Constellation::Qpsk;
  double tx_power_dbm = 30.0;
};

// CP-OFDM frame at kBaseRateHz, mean power set to tx_power_dbm exactly.
SampleBuffer generate_ofdm(const OfdmConfig& cfg, uint64_t seed);

// Windowed-sinc lowpass prototype used on both sides of the rate change.
// Unit DC gain, 16*factor+1 taps, cutoff at half the low-rate bandwidth.
std::vector<double> pulse_shaping_taps(int factor);

// Zero-stuff by factor and filter with the interpolating (factor-scaled)
// prototype. Causal; adds (16*factor+1-1)/2 samples of delay at the high rate.
SampleBuffer upsample_shape(const SampleBuffer& x, int factor);

// Matched anti-alias filter and pick every factor-th sample. Causal.
SampleBuffer downsample_matched(const SampleBuffer& y, int factor);

// Group delay of upsample_shape followed by downsample_matched, expressed
// in low-rate samples. Integer by construction of the prototype length.
int cascade_group_delay_samples(int factor);

// Power gain of downsample_matched for white input (sum of squared taps).
double downsample_noise_power_gain(int factor);

}  // namespace fdcancel::signal
