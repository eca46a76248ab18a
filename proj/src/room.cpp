// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/room.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "deverb/fft.hpp"

namespace deverb {

double RoomDescriptor::direct_distance() const {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = source_pos[i] - listener_pos[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

double RoomDescriptor::sabine_rt60() const {
  const double sxy = dims[0] * dims[1];
  const double sxz = dims[0] * dims[2];
  const double syz = dims[1] * dims[2];
  const double absorbing_area = syz * (absorption[0] + absorption[1]) +
                                sxz * (absorption[2] + absorption[3]) +
                                sxy * (absorption[4] + absorption[5]);
  return 0.161 * volume() / absorbing_area;
}

void RoomDescriptor::validate() const {
  for (int i = 0; i < 3; ++i)
    if (!(dims[i] > 0.0))
      throw std::invalid_argument("room: dims must be positive");
  for (double a : absorption)
    if (!(a > 0.0 && a <= 1.0))
      throw std::invalid_argument("room: absorption must lie in (0, 1]");
  for (int i = 0; i < 3; ++i) {
    if (!(source_pos[i] >= kWallClearance &&
          source_pos[i] <= dims[i] - kWallClearance))
      throw std::invalid_argument(
          "room: source_pos must be inside with >= 0.1 m wall clearance");
    if (!(listener_pos[i] >= kWallClearance &&
          listener_pos[i] <= dims[i] - kWallClearance))
      throw std::invalid_argument(
          "room: listener_pos must be inside with >= 0.1 m wall clearance");
  }
  if (direct_distance() == 0.0)
    throw std::invalid_argument("room: source and listener must differ");
  if (max_order < 0) throw std::invalid_argument("room: max_order >= 0");
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("room: speed_of_sound must be positive");
}

Rir image_source_rir(const RoomDescriptor& room, int sample_rate_hz,
                     long max_len_cap) {
  room.validate();
  const double c = room.speed_of_sound;
  const double fs = sample_rate_hz;
  const auto& L = room.dims;
  const auto& s = room.source_pos;
  const auto& r = room.listener_pos;

  // Pressure reflection coefficients: magnitude sqrt(1-a), sign flipped on
  // each bounce so overlapping taps sum incoherently like a real diffuse tail.
  std::array<double, 6> beta;
  for (int i = 0; i < 6; ++i) beta[i] = -std::sqrt(1.0 - room.absorption[i]);

  // Longest possible image distance at this reflection order bounds the
  // response length.
  const double max_dim = std::max({L[0], L[1], L[2]});
  const double diag = std::sqrt(L[0] * L[0] + L[1] * L[1] + L[2] * L[2]);
  const double max_dist = room.max_order * max_dim + diag;
  const long needed = std::lround(max_dist / c * fs) + 2;
  if (needed > max_len_cap)
    throw std::invalid_argument(
        "image_source_rir: response of " + std::to_string(needed) +
        " samples exceeds the length cap of " + std::to_string(max_len_cap) +
        " (lower max_order or raise the cap)");

  std::vector<double> h(needed, 0.0);
  const int order = room.max_order;

  // Grid bounds per axis: |2*m*L| <= max_dist plus one cell of slack.
  std::array<int, 3> mmax;
  for (int i = 0; i < 3; ++i)
    mmax[i] = static_cast<int>(std::ceil(max_dist / (2.0 * L[i]))) + 1;

  for (int mx = -mmax[0]; mx <= mmax[0]; ++mx) {
    if (2 * std::abs(mx) - 1 > order) continue;
    for (int my = -mmax[1]; my <= mmax[1]; ++my) {
      if ((2 * std::abs(mx) - 1) + (2 * std::abs(my) - 1) > order) continue;
      for (int mz = -mmax[2]; mz <= mmax[2]; ++mz) {
        for (int q = 0; q <= 1; ++q) {
          for (int j = 0; j <= 1; ++j) {
            for (int k = 0; k <= 1; ++k) {
              const int n_reflections = std::abs(2 * mx - q) +
                                        std::abs(2 * my - j) +
                                        std::abs(2 * mz - k);
              if (n_reflections > order) continue;
              const double ix = (1 - 2 * q) * s[0] + 2.0 * mx * L[0] - r[0];
              const double iy = (1 - 2 * j) * s[1] + 2.0 * my * L[1] - r[1];
              const double iz = (1 - 2 * k) * s[2] + 2.0 * mz * L[2] - r[2];
              const double dist = std::sqrt(ix * ix + iy * iy + iz * iz);
              const long idx = std::lround(dist / c * fs);
              if (idx >= needed) continue;
              const double refl =
                  std::pow(beta[0], std::abs(mx - q)) *
                  std::pow(beta[1], std::abs(mx)) *
                  std::pow(beta[2], std::abs(my - j)) *
                  std::pow(beta[3], std::abs(my)) *
                  std::pow(beta[4], std::abs(mz - k)) *
                  std::pow(beta[5], std::abs(mz));
              h[idx] += refl / (4.0 * std::numbers::pi * std::max(dist, 1e-2));
            }
          }
        }
      }
    }
  }

  // Trim trailing silence beyond the last tap.
  long last = needed - 1;
  while (last > 0 && h[last] == 0.0) --last;
  h.resize(last + 1);

  Rir rir;
  rir.samples = std::move(h);
  rir.sample_rate_hz = sample_rate_hz;
  return rir;
}

Waveform convolve_rir(const Waveform& clean, const Rir& rir) {
  if (clean.sample_rate_hz != rir.sample_rate_hz)
    throw std::invalid_argument("convolve_rir: sample-rate mismatch (" +
                                std::to_string(clean.sample_rate_hz) + " vs " +
                                std::to_string(rir.sample_rate_hz) + ")");
  if (clean.samples.empty() || rir.samples.empty())
    throw std::invalid_argument("convolve_rir: empty input");

  const long na = static_cast<long>(clean.samples.size());
  const long nb = static_cast<long>(rir.samples.size());
  const long out_len = na + nb - 1;

  Waveform out;
  out.sample_rate_hz = clean.sample_rate_hz;
  out.samples.resize(out_len);

  if (static_cast<double>(na) * nb < 4.0e6) {
    std::fill(out.samples.begin(), out.samples.end(), 0.0);
    for (long i = 0; i < na; ++i)
      for (long j = 0; j < nb; ++j)
        out.samples[i + j] += clean.samples[i] * rir.samples[j];
    return out;
  }

  const long n = next_power_of_two(out_len);
  std::vector<std::complex<double>> fa(n, {0.0, 0.0}), fb(n, {0.0, 0.0});
  for (long i = 0; i < na; ++i) fa[i] = {clean.samples[i], 0.0};
  for (long i = 0; i < nb; ++i) fb[i] = {rir.samples[i], 0.0};
  fft_inplace(fa, false);
  fft_inplace(fb, false);
  for (long i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace(fa, true);
  for (long i = 0; i < out_len; ++i) out.samples[i] = fa[i].real();
  return out;
}

double rt60_schroeder(const Rir& rir) {
  const auto& h = rir.samples;
  double total = 0.0;
  for (double v : h) total += v * v;
  if (!(total > 0.0))
    throw std::invalid_argument("rt60_schroeder: impulse response has no energy");

  // Backward energy integration, in dB relative to total energy.
  const long n = static_cast<long>(h.size());
  std::vector<double> db(n);
  double acc = 0.0;
  for (long i = n - 1; i >= 0; --i) {
    acc += h[i] * h[i];
    db[i] = 10.0 * std::log10(std::max(acc / total, 1e-300));
  }

  long i5 = -1, i25 = -1;
  for (long i = 0; i < n; ++i) {
    if (i5 < 0 && db[i] <= -5.0) i5 = i;
    if (db[i] <= -25.0) {
      i25 = i;
      break;
    }
  }

  if (i25 < 0) {
    // The curve never decays 25 dB within the response. A flat curve that
    // only drops at the final sample is an impulse: RT ~ 0. A curve that
    // starts decaying but flattens out cannot support a 20 dB fit.
    if (i5 < 0) return 0.0;
    throw std::invalid_argument(
        "rt60_schroeder: decay range shorter than 20 dB above the noise "
        "floor, estimate unreliable");
  }

  // The -25 dB point must sit clear of the late-curve noise floor; the
  // backward integral always plunges at the very last samples, so probe
  // at 90% of the response instead of the end.
  const double floor_db = db[std::min(n - 1, (9 * n) / 10)];
  if (floor_db > -35.0)
    throw std::invalid_argument(
        "rt60_schroeder: decay range shorter than 20 dB above the noise "
        "floor, estimate unreliable");

  // Least-squares line over the -5..-25 dB span, RT60 = 3 x fitted T20.
  const double fs = rir.sample_rate_hz;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long count = 0;
  for (long i = i5; i < i25; ++i) {
    const double t = static_cast<double>(i) / fs;
    sx += t;
    sy += db[i];
    sxx += t * t;
    sxy += t * db[i];
    ++count;
  }
  if (count < 8)  // near-instant drop, below one fitting span
    return 3.0 * static_cast<double>(i25 - i5) / fs;

  const double denom = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / denom;
  if (slope >= 0.0)
    throw std::invalid_argument("rt60_schroeder: non-decaying energy curve");
  const double t20 = -20.0 / slope;
  return 3.0 * t20;
}

Waveform add_noise(const Waveform& wave, double snr_db, uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return wave;
  const double signal_energy = wave.energy();
  if (!(signal_energy > 0.0))
    throw std::invalid_argument("add_noise: SNR undefined for silent input");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(wave.samples.size());
  double noise_energy = 0.0;
  for (auto& n : noise) {
    n = gauss(rng);
    noise_energy += n * n;
  }
  const double target_noise_energy =
      signal_energy * std::pow(10.0, -snr_db / 10.0);
  const double scale = std::sqrt(target_noise_energy / noise_energy);

  Waveform out = wave;
  for (size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] += scale * noise[i];
  return out;
}

}  // namespace deverb
