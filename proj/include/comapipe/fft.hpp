#pragma once

#include <complex>
#include <vector>

namespace comapipe {

// In-place iterative radix-2 FFT; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse = false);

// Forward DFT of a real signal, any length. Uses radix-2 when the length
// is a power of two and a direct O(n^2) transform otherwise; frame sizes
// in this pipeline are powers of two, the fallback exists for odd configs.
// Returns the one-sided half: n/2 + 1 bins.
std::vector<std::complex<double>> rdft_onesided(const std::vector<double>& x);

} // namespace comapipe
