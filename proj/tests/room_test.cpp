// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "deverb/room.hpp"
#include "test_util.hpp"

using namespace deverb;
using deverb::testing::naive_convolve;
using deverb::testing::random_waveform;

namespace {

RoomDescriptor basic_room() {
  RoomDescriptor room;
  room.dims = {5.0, 4.0, 3.0};
  room.absorption = {0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  room.source_pos = {1.2, 1.1, 1.5};
  room.listener_pos = {3.4, 2.9, 1.4};
  room.max_order = 40;
  return room;
}

RoomDescriptor seeded_room(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RoomDescriptor room;
  room.dims = {3.5 + 5.0 * u(rng), 3.0 + 4.0 * u(rng), 2.5 + 1.5 * u(rng)};
  const double a = 0.2 + 0.4 * u(rng);
  room.absorption.fill(a);
  auto place = [&](std::array<double, 3>& p) {
    for (int i = 0; i < 3; ++i) p[i] = 0.3 + (room.dims[i] - 0.6) * u(rng);
  };
  place(room.source_pos);
  place(room.listener_pos);
  if (room.direct_distance() < 0.3) room.listener_pos[0] += 0.5;
  room.max_order = 30;
  return room;
}

}  // namespace

TEST_CASE("direct path only: single tap at the geometric delay") {
  RoomDescriptor room = basic_room();
  room.max_order = 0;
  Rir rir = image_source_rir(room);

  const double d = room.direct_distance();
  const long expected_idx = std::lround(d / room.speed_of_sound * 16000.0);
  const double expected_amp = 1.0 / (4.0 * std::numbers::pi * d);

  long nonzero = 0, idx = -1;
  for (size_t i = 0; i < rir.samples.size(); ++i)
    if (rir.samples[i] != 0.0) {
      ++nonzero;
      idx = static_cast<long>(i);
    }
  CHECK(nonzero == 1);
  CHECK(idx == expected_idx);
  CHECK(rir.samples[idx] == doctest::Approx(expected_amp).epsilon(1e-12));
}

TEST_CASE("full absorption reduces to the direct path") {
  RoomDescriptor room = basic_room();
  room.absorption.fill(1.0);
  room.max_order = 25;
  Rir full = image_source_rir(room);

  room.max_order = 0;
  room.absorption.fill(0.3);
  Rir direct = image_source_rir(room);

  REQUIRE(full.samples.size() == direct.samples.size());
  for (size_t i = 0; i < full.samples.size(); ++i)
    CHECK(full.samples[i] == doctest::Approx(direct.samples[i]).epsilon(1e-12));
}

TEST_CASE("first arrival matches the geometric distance within one sample") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    RoomDescriptor room = seeded_room(seed);
    Rir rir = image_source_rir(room);
    long first = -1;
    for (size_t i = 0; i < rir.samples.size(); ++i)
      if (rir.samples[i] != 0.0) {
        first = static_cast<long>(i);
        break;
      }
    REQUIRE(first >= 0);
    const long geometric =
        std::lround(room.direct_distance() / room.speed_of_sound * 16000.0);
    CHECK(std::abs(first - geometric) <= 1);
  }
}

TEST_CASE("schroeder RT60 within 25% of the Sabine prediction") {
  RoomDescriptor room = basic_room();
  Rir rir = image_source_rir(room);
  const double sabine = room.sabine_rt60();
  const double est = rt60_schroeder(rir);
  CHECK(std::abs(est - sabine) / sabine <= 0.25);
}

TEST_CASE("RT60 monotone in absorption for matched rooms") {
  RoomDescriptor room = basic_room();
  room.absorption.fill(0.2);
  const double rt_low = rt60_schroeder(image_source_rir(room));
  room.absorption.fill(0.6);
  const double rt_high = rt60_schroeder(image_source_rir(room));
  CHECK(rt_low > rt_high);
}

TEST_CASE("RIR energy nonincreasing in each absorption coefficient") {
  for (uint64_t seed : {3ULL, 7ULL, 13ULL}) {
    RoomDescriptor room = seeded_room(seed);
    for (int wall = 0; wall < 6; wall += 2) {
      RoomDescriptor lower = room, higher = room;
      lower.absorption[wall] = 0.2;
      higher.absorption[wall] = 0.7;
      double e_low = 0.0, e_high = 0.0;
      for (double v : image_source_rir(lower).samples) e_low += v * v;
      for (double v : image_source_rir(higher).samples) e_high += v * v;
      CHECK(e_low >= e_high);
    }
  }
}

TEST_CASE("length cap raises a descriptive error") {
  RoomDescriptor room = basic_room();
  room.max_order = 4000;
  CHECK_THROWS_WITH_AS(image_source_rir(room, 16000, 96000),
                       doctest::Contains("length cap"), std::invalid_argument);
}

TEST_CASE("convolution identities and brute-force oracle") {
  Waveform x = random_waveform(1000, 5);

  Rir delta;
  delta.samples = {1.0};
  Waveform same = convolve_rir(x, delta);
  for (size_t i = 0; i < x.samples.size(); ++i)
    CHECK(same.samples[i] == doctest::Approx(x.samples[i]).epsilon(1e-14));

  Rir delayed;
  delayed.samples.assign(11, 0.0);
  delayed.samples[10] = 1.0;
  Waveform shifted = convolve_rir(x, delayed);
  for (size_t i = 0; i < x.samples.size(); ++i)
    CHECK(shifted.samples[i + 10] ==
          doctest::Approx(x.samples[i]).epsilon(1e-14));

  Rir random_rir;
  random_rir.samples = random_waveform(200, 6).samples;
  Waveform conv = convolve_rir(x, random_rir);
  auto oracle = naive_convolve(x.samples, random_rir.samples);
  REQUIRE(conv.samples.size() == oracle.size());
  for (size_t i = 0; i < oracle.size(); ++i)
    CHECK(std::abs(conv.samples[i] - oracle[i]) <= 1e-10);

  // the FFT path must agree with the oracle as well
  Waveform long_x = random_waveform(9000, 8);
  Rir long_rir;
  long_rir.samples = random_waveform(800, 9).samples;
  Waveform fast = convolve_rir(long_x, long_rir);
  auto slow = naive_convolve(long_x.samples, long_rir.samples);
  double err = 0.0;
  for (size_t i = 0; i < slow.size(); ++i)
    err = std::max(err, std::abs(fast.samples[i] - slow[i]));
  CHECK(err <= 1e-10);

  Waveform wrong_rate = x;
  wrong_rate.sample_rate_hz = 8000;
  CHECK_THROWS_WITH_AS(convolve_rir(wrong_rate, delta),
                       doctest::Contains("sample-rate mismatch"),
                       std::invalid_argument);
}

TEST_CASE("rt60 of a constructed exponential decay recovers T within 5%") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double T : {0.2, 0.5, 1.0}) {
    Rir rir;
    rir.sample_rate_hz = 16000;
    const long n = std::lround(2.0 * T * 16000.0);
    rir.samples.resize(n);
    for (long i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / 16000.0;
      rir.samples[i] = std::exp(-6.91 * t / T) * gauss(rng);
    }
    const double est = rt60_schroeder(rir);
    CHECK(std::abs(est - T) / T <= 0.05);
  }
}

TEST_CASE("rt60 of a single impulse is ~0") {
  Rir rir;
  rir.samples.assign(100, 0.0);
  rir.samples[60] = 0.8;
  rir.samples.resize(61);  // trailing silence trimmed
  CHECK(rt60_schroeder(rir) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rt60 rejects a decay that flattens above -25 dB") {
  Rir rir;
  rir.sample_rate_hz = 16000;
  rir.samples.resize(8000);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (long i = 0; i < 8000; ++i) {
    const double t = i / 16000.0;
    // fast decay into a noise floor ~18 dB down
    rir.samples[i] =
        std::exp(-6.91 * t / 0.05) * gauss(rng) + 0.12 * gauss(rng);
  }
  CHECK_THROWS_WITH_AS(rt60_schroeder(rir), doctest::Contains("noise floor"),
                       std::invalid_argument);
}

TEST_CASE("rt60 requires nonzero energy") {
  Rir rir;
  rir.samples.assign(100, 0.0);
  CHECK_THROWS_AS(rt60_schroeder(rir), std::invalid_argument);
}

TEST_CASE("add_noise hits the requested SNR and is seeded") {
  Waveform x = random_waveform(8000, 3);
  Waveform noisy = add_noise(x, 20.0, 42);

  double sig = 0.0, noise = 0.0;
  for (size_t i = 0; i < x.samples.size(); ++i) {
    sig += x.samples[i] * x.samples[i];
    const double n = noisy.samples[i] - x.samples[i];
    noise += n * n;
  }
  const double measured = 10.0 * std::log10(sig / noise);
  CHECK(std::abs(measured - 20.0) <= 0.1);

  Waveform again = add_noise(x, 20.0, 42);
  for (size_t i = 0; i < x.samples.size(); ++i)
    CHECK(again.samples[i] == noisy.samples[i]);

  Waveform same = add_noise(x, std::numeric_limits<double>::infinity(), 1);
  for (size_t i = 0; i < x.samples.size(); ++i)
    CHECK(same.samples[i] == x.samples[i]);

  Waveform silent;
  silent.samples.assign(100, 0.0);
  CHECK_THROWS_AS(add_noise(silent, 20.0, 1), std::invalid_argument);
}

TEST_CASE("room validation rejects bad descriptors") {
  RoomDescriptor room = basic_room();
  room.dims[0] = -1.0;
  CHECK_THROWS_AS(room.validate(), std::invalid_argument);

  room = basic_room();
  room.absorption[2] = 0.0;
  CHECK_THROWS_AS(room.validate(), std::invalid_argument);

  room = basic_room();
  room.source_pos = {0.05, 1.0, 1.0};  // closer than the wall clearance
  CHECK_THROWS_AS(room.validate(), std::invalid_argument);

  room = basic_room();
  room.listener_pos = room.source_pos;
  CHECK_THROWS_AS(room.validate(), std::invalid_argument);
}
