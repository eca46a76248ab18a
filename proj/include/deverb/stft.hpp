// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_STFT_HPP
#define DEVERB_STFT_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "deverb/waveform.hpp"

namespace deverb {

// Analysis window whose square overlap-adds to a constant at the given hop:
// w^2 is a length-hop boxcar convolved with a normalized tapered kernel of
// length win_len - hop + 1, which is a partition of unity over hop-shifts
// by construction.
std::vector<double> cola_window(int win_len, int hop);

struct StftConfig {
  int win_len = 400;
  int hop = 160;
  int fft_size = 512;
  std::vector<double> window;  // length win_len

  static StftConfig defaults();
  int bins() const { return fft_size / 2 + 1; }
  // Throws std::invalid_argument on hop/win/fft ordering violations,
  // a window of the wrong length, or a non-power-of-two fft size.
  void validate() const;
};

// T x F one-sided complex spectrogram. source_len carries the original
// sample count so the inverse transform can trim the zero right-padding.
struct ComplexSpectrogram {
  Eigen::MatrixXcd data;
  StftConfig config;
  long source_len = 0;
  int sample_rate_hz = 16000;

  long frames() const { return data.rows(); }
  long bins() const { return data.cols(); }
};

// Frame count for a signal of the given length: the final frame is filled
// with zero right-padding when the hop does not divide evenly.
long stft_frame_count(long len, const StftConfig& cfg);

ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg);

// Overlap-add synthesis with squared-window normalization;
// istft(stft(x)) reproduces x on [0, out_len). out_len <= (T-1)*hop+win_len.
Waveform istft(const ComplexSpectrogram& spec, const StftConfig& cfg,
               long out_len);
inline Waveform istft(const ComplexSpectrogram& spec) {
  return istft(spec, spec.config, spec.source_len);
}

}  // namespace deverb

#endif  // DEVERB_STFT_HPP
