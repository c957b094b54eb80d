#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fdcancel/errors.hpp"

namespace fdcancel {

using cplx = std::complex<double>;

// Baseband sample rate of the symbol-domain (canceller) clock.
inline constexpr double kBaseRateHz = 30.72e6;
// Sample rate of the wideband simulation clock.
inline constexpr double kSimRateHz = 122.88e6;

// A complex baseband signal tagged with the clock it lives on.
struct SampleBuffer {
  std::vector<cplx> samples;
  double rate_hz = 0.0;
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

// Mean of |x|^2. Power unit is milliwatts throughout (0 dBm == 1.0).
inline double mean_power_mw(const SampleBuffer& x) {
  if (x.samples.empty()) return 0.0;
  double acc = 0.0;
  for (const cplx& v : x.samples) acc += std::norm(v);
  return acc / static_cast<double>(x.samples.size());
}

// Rescales so that mean power equals power_dbm exactly.
inline SampleBuffer set_power(SampleBuffer x, double power_dbm) {
  const double p = mean_power_mw(x);
  if (p <= 0.0) throw ContractError("set_power: signal has zero power");
  const double s = std::sqrt(dbm_to_mw(power_dbm) / p);
  for (cplx& v : x.samples) v *= s;
  return x;
}

}  // namespace fdcancel
