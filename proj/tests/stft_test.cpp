// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "deverb/fft.hpp"
#include "deverb/stft.hpp"
#include "deverb/waveform.hpp"
#include "test_util.hpp"

using namespace deverb;
using deverb::testing::naive_frame_dft;
using deverb::testing::random_waveform;

TEST_CASE("fft round trip and known transform") {
  auto x = random_waveform(512, 99).samples;
  auto bins = rfft(x, 512);
  auto back = irfft(bins, 512);
  for (int i = 0; i < 512; ++i)
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));

  CHECK_THROWS(rfft(x, 500));  // not a power of two
}

TEST_CASE("squared window overlap-adds to a constant at defaults") {
  const StftConfig cfg = StftConfig::defaults();
  const long span = 16000;
  std::vector<double> acc(span, 0.0);
  long m = 0;
  while (m * cfg.hop + cfg.win_len <= span) {
    for (int n = 0; n < cfg.win_len; ++n)
      acc[m * cfg.hop + n] += cfg.window[n] * cfg.window[n];
    ++m;
  }
  double lo = 1e300, hi = -1e300;
  for (long i = cfg.win_len; i < (m - 1) * cfg.hop; ++i) {
    lo = std::min(lo, acc[i]);
    hi = std::max(hi, acc[i]);
  }
  CHECK((hi - lo) / hi <= 1e-10);
}

TEST_CASE("stft of silence is silent") {
  Waveform zero;
  zero.samples.assign(16000, 0.0);
  auto spec = stft(zero, StftConfig::defaults());
  CHECK(spec.data.cwiseAbs().maxCoeff() == 0.0);

  auto wave = istft(spec);
  for (double s : wave.samples) CHECK(s == 0.0);
}

TEST_CASE("stft frame count and error on short input") {
  const StftConfig cfg = StftConfig::defaults();
  CHECK(stft_frame_count(16000, cfg) == 99);
  CHECK(stft_frame_count(400, cfg) == 1);
  CHECK(stft_frame_count(560, cfg) == 2);

  Waveform tiny;
  tiny.samples.assign(399, 0.1);
  CHECK_THROWS_WITH_AS(stft(tiny, cfg),
                       doctest::Contains("at least one window"),
                       std::invalid_argument);
}

TEST_CASE("bin-centered sinusoid concentrates energy (naive DFT oracle)") {
  const StftConfig cfg = StftConfig::defaults();
  const double fs = 16000.0;
  for (int k : {5, 32, 100, 200}) {
    const double freq = k * fs / cfg.fft_size;
    Waveform w;
    w.samples.resize(16000);
    for (size_t i = 0; i < w.samples.size(); ++i)
      w.samples[i] = std::sin(2.0 * std::numbers::pi * freq * i / fs + 0.3);
    auto spec = stft(w, cfg);

    // interior frames only
    for (long t = 2; t < spec.frames() - 2; t += 17) {
      // oracle agreement
      auto oracle = naive_frame_dft(w.samples, t * cfg.hop, cfg);
      for (int b = 0; b < cfg.bins(); b += 13)
        CHECK(std::abs(spec.data(t, b) - oracle[b]) < 1e-9);

      double total = 0.0, near = 0.0;
      for (int b = 0; b < cfg.bins(); ++b) {
        const double e = std::norm(spec.data(t, b));
        total += e;
        if (std::abs(b - k) <= 1) near += e;
      }
      CHECK(near / total >= 0.99);
    }
  }
}

TEST_CASE("unit impulse at a frame center has flat magnitude = window value") {
  const StftConfig cfg = StftConfig::defaults();
  Waveform w;
  w.samples.assign(4000, 0.0);
  const long frame = 5;
  const int pos = 123;  // position inside the window
  w.samples[frame * cfg.hop + pos] = 1.0;

  auto spec = stft(w, cfg);
  const double expected = cfg.window[pos];
  for (int b = 0; b < cfg.bins(); ++b)
    CHECK(std::abs(spec.data(frame, b)) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("istft inverts stft to 1e-10 on seeded signals") {
  const StftConfig cfg = StftConfig::defaults();
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Waveform x = random_waveform(16000, seed);
    auto spec = stft(x, cfg);
    Waveform back = istft(spec);
    REQUIRE(back.samples.size() == x.samples.size());
    double err = 0.0;
    for (size_t i = 0; i < x.samples.size(); ++i)
      err = std::max(err, std::abs(back.samples[i] - x.samples[i]));
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("istft rejects out_len beyond the reconstructable span") {
  const StftConfig cfg = StftConfig::defaults();
  Waveform x = random_waveform(8000, 7);
  auto spec = stft(x, cfg);
  const long capacity = (spec.frames() - 1) * cfg.hop + cfg.win_len;
  CHECK_THROWS_AS(istft(spec, cfg, capacity + 1), std::invalid_argument);
}

TEST_CASE("both transforms are linear (superposition)") {
  const StftConfig cfg = StftConfig::defaults();
  Waveform x = random_waveform(6000, 11), y = random_waveform(6000, 12);
  const double a = 1.7, b = -0.6;

  Waveform mix = x;
  for (size_t i = 0; i < mix.samples.size(); ++i)
    mix.samples[i] = a * x.samples[i] + b * y.samples[i];

  auto sx = stft(x, cfg), sy = stft(y, cfg), sm = stft(mix, cfg);
  CHECK((sm.data - a * sx.data - b * sy.data).cwiseAbs().maxCoeff() < 1e-10);

  // istft linearity on spectrograms
  ComplexSpectrogram combo = sx;
  combo.data = a * sx.data + b * sy.data;
  Waveform wa = istft(sx), wb = istft(sy), wc = istft(combo);
  for (size_t i = 0; i < wc.samples.size(); ++i)
    CHECK(wc.samples[i] ==
          doctest::Approx(a * wa.samples[i] + b * wb.samples[i])
              .epsilon(1e-10));
}

TEST_CASE("frame-wise Parseval consistency") {
  const StftConfig cfg = StftConfig::defaults();
  Waveform x = random_waveform(5000, 21);
  auto spec = stft(x, cfg);

  for (long t = 0; t < spec.frames(); t += 7) {
    double time_energy = 0.0;
    for (int n = 0; n < cfg.win_len; ++n) {
      const long idx = t * cfg.hop + n;
      const double v =
          idx < static_cast<long>(x.samples.size()) ? x.samples[idx] : 0.0;
      time_energy += v * v * cfg.window[n] * cfg.window[n];
    }
    double spec_energy = 0.0;
    for (int k = 0; k < cfg.bins(); ++k) {
      const double scale = (k == 0 || k == cfg.fft_size / 2) ? 1.0 : 2.0;
      spec_energy += scale * std::norm(spec.data(t, k));
    }
    spec_energy /= cfg.fft_size;
    CHECK(spec_energy == doctest::Approx(time_energy).epsilon(1e-8));
  }
}

TEST_CASE("stft config validation") {
  StftConfig cfg = StftConfig::defaults();
  cfg.hop = 500;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = StftConfig::defaults();
  cfg.fft_size = 300;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("wav io round trips float32 and rejects other rates") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "deverb_wav_test";
  fs::create_directories(dir);

  Waveform x = random_waveform(2000, 5);
  const std::string f32 = (dir / "a.wav").string();
  write_wav(f32, x, WavFormat::kFloat32);
  Waveform back = read_wav(f32, 16000);
  REQUIRE(back.samples.size() == x.samples.size());
  for (size_t i = 0; i < x.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - x.samples[i]) < 1e-7);

  const std::string p16 = (dir / "b.wav").string();
  write_wav(p16, x, WavFormat::kPcm16);
  Waveform q = read_wav(p16, 16000);
  for (size_t i = 0; i < x.samples.size(); ++i)
    CHECK(std::abs(q.samples[i] - x.samples[i]) < 1.0 / 32000.0);

  CHECK_THROWS_WITH_AS(read_wav(f32, 8000), doctest::Contains("sample rate"),
                       std::runtime_error);
  fs::remove_all(dir);
}
