// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_TESTS_TEST_UTIL_HPP
#define DEVERB_TESTS_TEST_UTIL_HPP

#include <complex>
#include <random>
#include <vector>

#include "deverb/stft.hpp"
#include "deverb/waveform.hpp"

namespace deverb::testing {

inline Waveform random_waveform(long n, uint64_t seed, double amp = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  Waveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = d(rng);
  return w;
}

// Independent oracle: direct DFT of one windowed frame.
inline std::vector<std::complex<double>> naive_frame_dft(
    const std::vector<double>& wave, long frame_start, const StftConfig& cfg) {
  std::vector<std::complex<double>> bins(cfg.bins());
  for (int k = 0; k < cfg.bins(); ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int n = 0; n < cfg.fft_size; ++n) {
      double x = 0.0;
      if (n < cfg.win_len) {
        const long idx = frame_start + n;
        if (idx >= 0 && idx < static_cast<long>(wave.size()))
          x = wave[idx] * cfg.window[n];
      }
      const double ang = -2.0 * 3.14159265358979323846 * k * n / cfg.fft_size;
      acc += x * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    bins[k] = acc;
  }
  return bins;
}

// Brute-force O(n^2) linear convolution oracle.
inline std::vector<double> naive_convolve(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace deverb::testing

#endif  // DEVERB_TESTS_TEST_UTIL_HPP
