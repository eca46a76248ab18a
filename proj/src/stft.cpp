// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deverb/fft.hpp"

namespace deverb {

std::vector<double> cola_window(int win_len, int hop) {
  if (win_len <= 0 || hop <= 0 || hop > win_len)
    throw std::invalid_argument("cola_window: need 0 < hop <= win_len");
  if (hop == win_len) return std::vector<double>(win_len, 1.0);

  const int klen = win_len - hop + 1;
  std::vector<double> kernel(klen);
  double ksum = 0.0;
  for (int i = 0; i < klen; ++i) {
    // symmetric raised cosine, strictly positive at both ends
    kernel[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (i + 1) /
                                      (klen + 1)));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  // w^2[n] = sum_{j in [0,hop)} kernel[n-j]
  std::vector<double> w(win_len, 0.0);
  for (int n = 0; n < win_len; ++n) {
    double acc = 0.0;
    const int jlo = std::max(0, n - klen + 1);
    const int jhi = std::min(hop - 1, n);
    for (int j = jlo; j <= jhi; ++j) acc += kernel[n - j];
    w[n] = std::sqrt(acc);
  }
  return w;
}

StftConfig StftConfig::defaults() {
  StftConfig cfg;
  cfg.window = cola_window(cfg.win_len, cfg.hop);
  return cfg;
}

void StftConfig::validate() const {
  if (hop <= 0 || win_len <= 0 || fft_size <= 0)
    throw std::invalid_argument("stft config: sizes must be positive");
  if (!(hop <= win_len && win_len <= fft_size))
    throw std::invalid_argument("stft config: need hop <= win_len <= fft_size");
  if (!is_power_of_two(fft_size))
    throw std::invalid_argument("stft config: fft_size must be a power of two");
  if (window.size() != static_cast<size_t>(win_len))
    throw std::invalid_argument("stft config: window length != win_len");
}

long stft_frame_count(long len, const StftConfig& cfg) {
  if (len < cfg.win_len) return 0;
  return 1 + (len - cfg.win_len + cfg.hop - 1) / cfg.hop;
}

ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg) {
  cfg.validate();
  const long len = static_cast<long>(wave.samples.size());
  if (len < cfg.win_len)
    throw std::invalid_argument(
        "stft: waveform has " + std::to_string(len) +
        " samples, need at least one window (" + std::to_string(cfg.win_len) +
        ")");

  const long frames = stft_frame_count(len, cfg);
  const int bins = cfg.bins();
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.source_len = len;
  spec.sample_rate_hz = wave.sample_rate_hz;
  spec.data.resize(frames, bins);

  std::vector<double> frame(cfg.win_len);
  for (long t = 0; t < frames; ++t) {
    const long start = t * cfg.hop;
    for (int n = 0; n < cfg.win_len; ++n) {
      const long idx = start + n;
      frame[n] = idx < len ? wave.samples[idx] * cfg.window[n] : 0.0;
    }
    auto spectrum = rfft(frame, cfg.fft_size);
    for (int k = 0; k < bins; ++k) spec.data(t, k) = spectrum[k];
  }
  return spec;
}

Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg,
               long out_len) {
  cfg.validate();
  if (spec.data.cols() != cfg.bins())
    throw std::invalid_argument("istft: spectrogram bins do not match config");
  const long frames = spec.data.rows();
  const long capacity = (frames - 1) * cfg.hop + cfg.win_len;
  if (out_len > capacity)
    throw std::invalid_argument(
        "istft: out_len " + std::to_string(out_len) +
        " exceeds reconstructable length " + std::to_string(capacity));
  if (out_len < 0) throw std::invalid_argument("istft: negative out_len");

  std::vector<double> acc(capacity, 0.0), norm(capacity, 0.0);
  std::vector<std::complex<double>> bins(cfg.bins());
  for (long t = 0; t < frames; ++t) {
    for (int k = 0; k < cfg.bins(); ++k) bins[k] = spec.data(t, k);
    auto frame = irfft(bins, cfg.fft_size);
    const long start = t * cfg.hop;
    for (int n = 0; n < cfg.win_len; ++n) {
      acc[start + n] += cfg.window[n] * frame[n];
      norm[start + n] += cfg.window[n] * cfg.window[n];
    }
  }

  Waveform out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples.resize(out_len);
  for (long n = 0; n < out_len; ++n)
    out.samples[n] = norm[n] > 0.0 ? acc[n] / norm[n] : 0.0;
  return out;
}

}  // namespace deverb
