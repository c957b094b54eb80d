#pragma once

#include <complex>
#include <vector>

namespace fdcancel {

// In-place radix-2 transform. Size must be a power of two.
// The inverse applies the 1/N factor.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace fdcancel
