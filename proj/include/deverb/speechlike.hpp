// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_SPEECHLIKE_HPP
#define DEVERB_SPEECHLIKE_HPP

#include <cstdint>

#include "deverb/waveform.hpp"

namespace deverb {

// Seeded synthetic speech-like source: harmonic pulse trains with drifting
// pitch and formants, syllable-rate amplitude envelope, and shaped-noise
// bursts. Broadband enough for deconvolution-based metrics.
Waveform synth_speech_like(double seconds, int sample_rate_hz, uint64_t seed);

}  // namespace deverb

#endif  // DEVERB_SPEECHLIKE_HPP
