// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace deverb {

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

long next_power_of_two(long n) {
  long p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
  const size_t n = x.size();
  if (!is_power_of_two(static_cast<long>(n)))
    throw std::invalid_argument("fft: size must be a power of two, got " +
                                std::to_string(n));
  // bit reversal
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = x[i + k];
        std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= inv;
  }
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x, int n) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("rfft: fft size must be a power of two");
  std::vector<std::complex<double>> buf(n, {0.0, 0.0});
  const size_t m = std::min<size_t>(x.size(), n);
  for (size_t i = 0; i < m; ++i) buf[i] = {x[i], 0.0};
  fft_inplace(buf, false);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& bins, int n) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("irfft: fft size must be a power of two");
  if (bins.size() != static_cast<size_t>(n / 2 + 1))
    throw std::invalid_argument("irfft: expected n/2+1 bins");
  std::vector<std::complex<double>> buf(n);
  for (int k = 0; k <= n / 2; ++k) buf[k] = bins[k];
  for (int k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(bins[n - k]);
  fft_inplace(buf, true);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace deverb
