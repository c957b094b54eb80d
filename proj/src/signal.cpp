#include "fdcancel/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fdcancel/fft.hpp"

namespace fdcancel::signal {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const OfdmConfig& cfg) {
  if (!is_pow2(cfg.fft_size))
    throw ConfigError("ofdm: fft_size must be a power of two");
  if (cfg.num_symbols <= 0) throw ConfigError("ofdm: num_symbols must be > 0");
  if (cfg.cp_len < 0 || cfg.cp_len > cfg.fft_size)
    throw ConfigError("ofdm: cp_len must be in [0, fft_size]");
  if (cfg.occupied_subcarriers <= 1)
    throw ConfigError("ofdm: occupied_subcarriers must be > 1");
  if (cfg.occupied_subcarriers > cfg.fft_size)
    throw ConfigError("ofdm: occupied_subcarriers must be <= fft_size");
  if (cfg.upsample_factor < 1)
    throw ConfigError("ofdm: upsample_factor must be >= 1");
}

cplx draw_symbol(std::mt19937_64& eng, Constellation c) {
  if (c == Constellation::Qpsk) {
    const uint64_t b = eng() & 3u;
    const double s = std::numbers::sqrt2 / 2.0;
    return {(b & 1u) ? -s : s, (b & 2u) ? -s : s};
  }
  // 16-QAM, Gray-free level pick; unit mean energy.
  static const double lv[4] = {-3.0, -1.0, 1.0, 3.0};
  const uint64_t b = eng() & 15u;
  const double s = 1.0 / std::sqrt(10.0);
  return {lv[b & 3u] * s, lv[(b >> 2) & 3u] * s};
}

double bessel_i0(double x) {
  const double h = x / 2.0;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (h / k) * (h / k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

}  // namespace

SampleBuffer generate_ofdm(const OfdmConfig& cfg, uint64_t seed) {
  validate(cfg);
  const int n = cfg.fft_size;
  const int occ = cfg.occupied_subcarriers;
  // Symmetric grid around DC; DC itself is nulled.
  const int lo = -(occ / 2);
  const int hi = lo + occ - 1;
  int active = 0;
  for (int s = lo; s <= hi; ++s)
    if (s != 0) ++active;

  std::mt19937_64 eng(seed);
  SampleBuffer out;
  out.rate_hz = kBaseRateHz;
  out.samples.reserve(static_cast<size_t>(cfg.num_symbols) * (n + cfg.cp_len));

  std::vector<cplx> grid(static_cast<size_t>(n));
  const double scale = static_cast<double>(n) / std::sqrt(static_cast<double>(active));
  for (int sym = 0; sym < cfg.num_symbols; ++sym) {
    std::fill(grid.begin(), grid.end(), cplx(0.0, 0.0));
    for (int s = lo; s <= hi; ++s) {
      if (s == 0) continue;
      const int bin = (s + n) % n;
      grid[static_cast<size_t>(bin)] = draw_symbol(eng, cfg.constellation);
    }
    fft_inplace(grid, true);
    for (auto& v : grid) v *= scale;
    for (int i = n - cfg.cp_len; i < n; ++i) out.samples.push_back(grid[static_cast<size_t>(i)]);
    for (int i = 0; i < n; ++i) out.samples.push_back(grid[static_cast<size_t>(i)]);
  }
  return set_power(std::move(out), cfg.tx_power_dbm);
}

std::vector<double> pulse_shaping_taps(int factor) {
  if (factor < 1) throw ConfigError("pulse_shaping_taps: factor must be >= 1");
  const int ntaps = 16 * factor + 1;
  const int mid = (ntaps - 1) / 2;
  const double beta = 7.857;  // ~80 dB stopband for a Kaiser window
  const double fc = 0.5 / static_cast<double>(factor);
  const double i0b = bessel_i0(beta);
  std::vector<double> h(static_cast<size_t>(ntaps));
  double sum = 0.0;
  for (int i = 0; i < ntaps; ++i) {
    const double t = static_cast<double>(i - mid);
    const double x = 2.0 * fc * t;
    const double sinc =
        (t == 0.0) ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = t / static_cast<double>(mid);
    const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[static_cast<size_t>(i)] = 2.0 * fc * sinc * win;
    sum += h[static_cast<size_t>(i)];
  }
  for (auto& v : h) v /= sum;
  return h;
}

SampleBuffer upsample_shape(const SampleBuffer& x, int factor) {
  if (factor < 1) throw ConfigError("upsample_shape: factor must be >= 1");
  if (x.rate_hz <= 0.0) throw ContractError("upsample_shape: missing sample rate");
  std::vector<double> h = pulse_shaping_taps(factor);
  for (auto& v : h) v *= static_cast<double>(factor);
  const int ntaps = static_cast<int>(h.size());
  const long long n = static_cast<long long>(x.samples.size());

  SampleBuffer out;
  out.rate_hz = x.rate_hz * static_cast<double>(factor);
  out.samples.assign(static_cast<size_t>(n * factor), cplx(0.0, 0.0));
  for (long long t = 0; t < n * factor; ++t) {
    cplx acc(0.0, 0.0);
    for (int i = static_cast<int>(t % factor); i < ntaps; i += factor) {
      const long long k = (t - i) / factor;
      if (k >= 0 && k < n) acc += h[static_cast<size_t>(i)] * x.samples[static_cast<size_t>(k)];
    }
    out.samples[static_cast<size_t>(t)] = acc;
  }
  return out;
}

SampleBuffer downsample_matched(const SampleBuffer& y, int factor) {
  if (factor < 1) throw ConfigError("downsample_matched: factor must be >= 1");
  if (y.rate_hz <= 0.0) throw ContractError("downsample_matched: missing sample rate");
  const std::vector<double> h0 = pulse_shaping_taps(factor);
  const int ntaps = static_cast<int>(h0.size());
  const long long n = static_cast<long long>(y.samples.size());

  SampleBuffer out;
  out.rate_hz = y.rate_hz / static_cast<double>(factor);
  const long long m = n / factor;
  out.samples.assign(static_cast<size_t>(m), cplx(0.0, 0.0));
  for (long long k = 0; k < m; ++k) {
    const long long t = k * factor;
    cplx acc(0.0, 0.0);
    const int imax = static_cast<int>(std::min<long long>(ntaps - 1, t));
    for (int i = 0; i <= imax; ++i)
      acc += h0[static_cast<size_t>(i)] * y.samples[static_cast<size_t>(t - i)];
    out.samples[static_cast<size_t>(k)] = acc;
  }
  return out;
}

int cascade_group_delay_samples(int factor) {
  const int mid = (16 * factor + 1 - 1) / 2;  // per-filter delay at high rate
  return (2 * mid) / factor;
}

double downsample_noise_power_gain(int factor) {
  double g = 0.0;
  for (double v : pulse_shaping_taps(factor)) g += v * v;
  return g;
}

}  // namespace fdcancel::signal
