// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_FFT_HPP
#define DEVERB_FFT_HPP

#include <complex>
#include <vector>

namespace deverb {

// Radix-2 in-place FFT. n must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse);

// One-sided real FFT: n real samples -> n/2+1 bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x, int n);

// Inverse of rfft: n/2+1 bins -> n real samples (assumes conjugate symmetry).
std::vector<double> irfft(const std::vector<std::complex<double>>& bins, int n);

bool is_power_of_two(long n);
long next_power_of_two(long n);

}  // namespace deverb

#endif  // DEVERB_FFT_HPP
