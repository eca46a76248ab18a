// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_ROOM_HPP
#define DEVERB_ROOM_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "deverb/waveform.hpp"

namespace deverb {

// Shoebox room. Absorption coefficients are energy fractions in (0, 1],
// ordered x=0, x=Lx, y=0, y=Ly, z=0 (floor), z=Lz (ceiling).
struct RoomDescriptor {
  std::array<double, 3> dims{5.0, 4.0, 3.0};
  std::array<double, 6> absorption{0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  std::array<double, 3> source_pos{1.0, 1.0, 1.5};
  std::array<double, 3> listener_pos{3.0, 2.5, 1.5};
  int max_order = 40;
  double speed_of_sound = 343.0;

  static constexpr double kWallClearance = 0.1;

  double volume() const { return dims[0] * dims[1] * dims[2]; }
  double surface() const {
    return 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
  }
  double direct_distance() const;
  // Sabine prediction T = 0.161 V / sum(S_i * a_i).
  double sabine_rt60() const;
  void validate() const;
};

struct Rir {
  std::vector<double> samples;
  int sample_rate_hz = 16000;
};

// Image-source simulation. Direct path lands at round(d/c*fs) with amplitude
// 1/(4*pi*d); every image is attenuated by prod(sqrt(1-a)) over its
// reflection sequence, with the pressure sign flipping per reflection. Taps
// are rounded to the nearest sample. Throws when the response would exceed
// max_len_cap samples.
Rir image_source_rir(const RoomDescriptor& room, int sample_rate_hz = 16000,
                     long max_len_cap = 96000);

// Full linear convolution; output length = len(clean) + len(rir) - 1.
Waveform convolve_rir(const Waveform& clean, const Rir& rir);

// Schroeder backward integration, least-squares line fit over the
// -5 dB..-25 dB span of the decay curve, RT60 = 3 x fitted T20.
// Throws when the curve never reaches -25 dB (unreliable estimate).
double rt60_schroeder(const Rir& rir);

// Additive seeded Gaussian noise scaled for the requested SNR in dB.
// +infinity returns the input unchanged; silent input throws.
Waveform add_noise(const Waveform& wave, double snr_db, uint64_t seed);

}  // namespace deverb

#endif  // DEVERB_ROOM_HPP
