// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_WAVEFORM_HPP
#define DEVERB_WAVEFORM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace deverb {

// Mono time-domain signal, nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  double energy() const;

  // Throws std::invalid_argument when a sample is non-finite or the rate
  // is not positive.
  void validate() const;
};

enum class WavFormat { kPcm16, kFloat32 };

// Mono WAV only. The reader accepts PCM16 and IEEE float32 data and
// rejects any sample rate other than expected_rate_hz (no resampling).
Waveform read_wav(const std::string& path, int expected_rate_hz = 16000);
void write_wav(const std::string& path, const Waveform& wave,
               WavFormat format = WavFormat::kFloat32);

}  // namespace deverb

#endif  // DEVERB_WAVEFORM_HPP
