// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/speechlike.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace deverb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double formant_gain(double freq_hz, const double centers[3],
                    const double widths[3]) {
  double g = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double z = (freq_hz - centers[i]) / widths[i];
    g += std::exp(-0.5 * z * z);
  }
  // gentle spectral tilt, roughly -6 dB/octave above 500 Hz
  return g * 500.0 / (500.0 + freq_hz);
}

}  // namespace

Waveform synth_speech_like(double seconds, int sample_rate_hz, uint64_t seed) {
  if (seconds <= 0.0 || sample_rate_hz <= 0)
    throw std::invalid_argument("synth_speech_like: invalid duration or rate");

  const long n = std::lround(seconds * sample_rate_hz);
  const double fs = sample_rate_hz;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double f0_base = 90.0 + 130.0 * uni(rng);
  const double f0_vib_rate = 3.0 + 4.0 * uni(rng);
  const double f0_vib_depth = 0.02 + 0.04 * uni(rng);
  const double f0_drift_rate = 0.3 + 0.5 * uni(rng);
  const double f0_drift_depth = 0.08 + 0.10 * uni(rng);
  const double drift_phase = kTwoPi * uni(rng);

  double centers[3] = {450.0 + 350.0 * uni(rng), 1000.0 + 800.0 * uni(rng),
                       2200.0 + 800.0 * uni(rng)};
  double widths[3] = {120.0 + 80.0 * uni(rng), 160.0 + 120.0 * uni(rng),
                      220.0 + 160.0 * uni(rng)};
  const double formant_rate[3] = {0.6 + 0.8 * uni(rng), 0.5 + 0.9 * uni(rng),
                                  0.4 + 0.7 * uni(rng)};
  const double formant_span[3] = {120.0, 260.0, 300.0};
  const double formant_phase[3] = {kTwoPi * uni(rng), kTwoPi * uni(rng),
                                   kTwoPi * uni(rng)};

  // Syllable-rate gate: alternating voiced/unvoiced stretches, smoothed.
  const double syllable_rate = 3.0 + 3.0 * uni(rng);
  std::vector<double> voiced_gate(n), burst_gate(n);
  {
    long pos = 0;
    bool voiced = true;
    while (pos < n) {
      const double dur = (0.5 + uni(rng)) / syllable_rate;
      const long seg = std::max<long>(1, std::lround(dur * fs));
      const double level = voiced ? 0.7 + 0.3 * uni(rng) : 0.0;
      const double burst = voiced ? 0.0 : (uni(rng) < 0.7 ? 0.5 + 0.5 * uni(rng) : 0.0);
      for (long i = pos; i < std::min(n, pos + seg); ++i) {
        voiced_gate[i] = level;
        burst_gate[i] = burst;
      }
      pos += seg;
      voiced = !voiced;
    }
    // one-pole smoothing, ~8 ms
    const double a = std::exp(-1.0 / (0.008 * fs));
    double sv = 0.0, sb = 0.0;
    for (long i = 0; i < n; ++i) {
      sv = a * sv + (1.0 - a) * voiced_gate[i];
      sb = a * sb + (1.0 - a) * burst_gate[i];
      voiced_gate[i] = sv;
      burst_gate[i] = sb;
    }
  }

  const int max_harmonics = 40;
  std::vector<double> phase(max_harmonics, 0.0);
  std::vector<double> amp(max_harmonics, 0.0);
  Waveform wave;
  wave.sample_rate_hz = sample_rate_hz;
  wave.samples.resize(n);

  const long block = std::lround(0.01 * fs);
  double prev_noise = 0.0;
  for (long i = 0; i < n; ++i) {
    const double t = i / fs;
    const double f0 =
        f0_base *
        (1.0 + f0_drift_depth * std::sin(kTwoPi * f0_drift_rate * t + drift_phase)) *
        (1.0 + f0_vib_depth * std::sin(kTwoPi * f0_vib_rate * t));

    if (i % block == 0) {
      double c[3];
      for (int m = 0; m < 3; ++m)
        c[m] = centers[m] +
               formant_span[m] *
                   std::sin(kTwoPi * formant_rate[m] * t + formant_phase[m]);
      for (int h = 0; h < max_harmonics; ++h) {
        const double fh = (h + 1) * f0;
        amp[h] = fh < std::min(0.45 * fs, 6800.0)
                     ? formant_gain(fh, c, widths) / (h + 1.0) * 3.0
                     : 0.0;
      }
    }

    double v = 0.0;
    for (int h = 0; h < max_harmonics; ++h) {
      if (amp[h] == 0.0) continue;
      phase[h] += kTwoPi * (h + 1) * f0 / fs;
      if (phase[h] > kTwoPi) phase[h] -= kTwoPi;
      v += amp[h] * std::sin(phase[h]);
    }

    // shaped noise: first difference of white noise gives HF emphasis
    const double white = gauss(rng);
    const double fric = (white - 0.55 * prev_noise);
    prev_noise = white;

    wave.samples[i] = voiced_gate[i] * v * 0.22 +
                      burst_gate[i] * fric * 0.05 + 0.003 * white;
  }

  // normalize to a consistent peak
  double peak = 0.0;
  for (double s : wave.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    const double g = 0.5 / peak;
    for (double& s : wave.samples) s *= g;
  }
  return wave;
}

}  // namespace deverb
