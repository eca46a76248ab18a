// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <random>

#include "deverb/cirm.hpp"
#include "test_util.hpp"

using namespace deverb;
using deverb::testing::random_waveform;

namespace {

ComplexSpectrogram random_spec(long t, long f, uint64_t seed, double lo = 0.2,
                               double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_real_distribution<double> sgn(-1.0, 1.0);
  ComplexSpectrogram s;
  s.config = StftConfig::defaults();
  s.data.resize(t, f);
  for (long i = 0; i < t; ++i)
    for (long j = 0; j < f; ++j)
      s.data(i, j) = {mag(rng) * (sgn(rng) > 0 ? 1.0 : -1.0),
                      mag(rng) * (sgn(rng) > 0 ? 1.0 : -1.0)};
  return s;
}

}  // namespace

TEST_CASE("identical pair gives the unit mask") {
  auto spec = random_spec(6, 9, 1);
  auto mask = cirm_from_pair(spec, spec, 1e-8);
  for (long t = 0; t < 6; ++t)
    for (long f = 0; f < 9; ++f) {
      CHECK(mask.data(t, f).real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(mask.data(t, f).imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("clean = j * reverb gives the purely imaginary unit mask") {
  auto reverb = random_spec(5, 7, 2);
  ComplexSpectrogram clean = reverb;
  clean.data = reverb.data * std::complex<double>(0.0, 1.0);
  auto mask = cirm_from_pair(clean, reverb, 1e-8);
  for (long t = 0; t < 5; ++t)
    for (long f = 0; f < 7; ++f) {
      CHECK(mask.data(t, f).real() == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(mask.data(t, f).imag() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mask application recovers the clean spectrogram exactly") {
  auto clean = random_spec(8, 12, 3);
  auto reverb = random_spec(8, 12, 4);  // magnitudes above the floor
  auto mask = cirm_from_pair(clean, reverb, 1e-8);
  CHECK(mask.floor_hits.cast<int>().sum() == 0);
  auto rec = apply_mask(mask, reverb);
  CHECK((rec.data - clean.data).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("floored bins are recorded and masked output stays finite") {
  auto clean = random_spec(3, 4, 5);
  auto reverb = random_spec(3, 4, 6);
  reverb.data(1, 2) = {1e-9, 0.0};  // power 1e-18 < floor
  auto mask = cirm_from_pair(clean, reverb, 1e-8);
  CHECK(mask.floor_hits(1, 2));
  CHECK(mask.floor_hits.cast<int>().sum() == 1);
  CHECK(std::isfinite(mask.data(1, 2).real()));
}

TEST_CASE("apply_mask identities and complex-multiply oracle") {
  auto reverb = random_spec(6, 8, 7);
  ComplexMask unit;
  unit.data = Eigen::MatrixXcd::Constant(6, 8, {1.0, 0.0});
  auto same = apply_mask(unit, reverb);
  CHECK((same.data - reverb.data).cwiseAbs().maxCoeff() == 0.0);

  ComplexMask zero;
  zero.data = Eigen::MatrixXcd::Zero(6, 8);
  auto silent = apply_mask(zero, reverb);
  CHECK(silent.data.cwiseAbs().maxCoeff() == 0.0);

  auto mask_spec = random_spec(6, 8, 8);
  ComplexMask mask;
  mask.data = mask_spec.data;
  auto out = apply_mask(mask, reverb);
  for (long t = 0; t < 6; ++t)
    for (long f = 0; f < 8; ++f) {
      const double a = mask.data(t, f).real(), b = mask.data(t, f).imag();
      const double c = reverb.data(t, f).real(), d = reverb.data(t, f).imag();
      CHECK(out.data(t, f).real() ==
            doctest::Approx(a * c - b * d).epsilon(1e-12));
      CHECK(out.data(t, f).imag() ==
            doctest::Approx(a * d + b * c).epsilon(1e-12));
    }

  ComplexSpectrogram small = reverb;
  small.data.resize(3, 3);
  CHECK_THROWS_AS(apply_mask(mask, small), std::invalid_argument);
}

TEST_CASE("homogeneity in the clean input away from floored bins") {
  auto clean = random_spec(5, 6, 9);
  auto reverb = random_spec(5, 6, 10);
  const double alpha = 2.75;
  ComplexSpectrogram scaled = clean;
  scaled.data = clean.data * alpha;
  auto m1 = cirm_from_pair(clean, reverb, 1e-8);
  auto m2 = cirm_from_pair(scaled, reverb, 1e-8);
  CHECK((m2.data - alpha * m1.data).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("conjugation symmetry") {
  auto clean = random_spec(4, 5, 11);
  auto reverb = random_spec(4, 5, 12);
  ComplexSpectrogram cc = clean, cr = reverb;
  cc.data = clean.data.conjugate();
  cr.data = reverb.data.conjugate();
  auto m = cirm_from_pair(clean, reverb, 1e-8);
  auto mc = cirm_from_pair(cc, cr, 1e-8);
  CHECK((mc.data - m.data.conjugate()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("compression bounds, inverse, and range errors") {
  ComplexMask mask;
  mask.data.resize(1, 3);
  mask.data(0, 0) = {0.0, 0.0};
  mask.data(0, 1) = {7.5, -8.0};
  mask.data(0, 2) = {-42.0, 3.0};

  auto compressed = compress_mask(mask);
  CHECK(compressed.data(0, 0) == std::complex<double>(0.0, 0.0));
  for (long f = 0; f < 3; ++f) {
    CHECK(std::abs(compressed.data(0, f).real()) < kMaskCompressK);
    CHECK(std::abs(compressed.data(0, f).imag()) < kMaskCompressK);
  }

  // inverse to 1e-9 for |x| <= 8
  auto back = decompress_mask(compressed);
  CHECK(back.data(0, 1).real() == doctest::Approx(7.5).epsilon(1e-9));
  CHECK(back.data(0, 1).imag() == doctest::Approx(-8.0).epsilon(1e-9));

  ComplexMask outside;
  outside.data.resize(1, 1);
  outside.data(0, 0) = {kMaskCompressK, 0.0};
  CHECK_THROWS_WITH_AS(decompress_mask(outside), doctest::Contains("bound"),
                       std::invalid_argument);
}

TEST_CASE("shape mismatch raises") {
  auto a = random_spec(4, 4, 13);
  auto b = random_spec(4, 5, 14);
  CHECK_THROWS_AS(cirm_from_pair(a, b, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(cirm_from_pair(a, a, 0.0), std::invalid_argument);
}
