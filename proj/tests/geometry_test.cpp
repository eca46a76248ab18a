// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>

#include "deverb/geometry.hpp"

using namespace deverb;

namespace {

RoomDescriptor cube_centered() {
  RoomDescriptor room;
  room.dims = {4.0, 4.0, 4.0};
  room.absorption.fill(0.4);
  room.listener_pos = {2.0, 2.0, 1.2};
  room.source_pos = {2.0, 2.0, 2.4};  // straight above the listener
  return room;
}

}  // namespace

TEST_CASE("featurizer is deterministic") {
  RoomDescriptor room = cube_centered();
  auto a = room_to_features(room, 64, 64);
  auto b = room_to_features(room, 64, 64);
  CHECK((a.seq - b.seq).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.positions() == 64);
  CHECK(a.feature_dims() == 64);
}

TEST_CASE("cubic room with centered listener/source: 90-degree symmetry") {
  const int n = 64;
  auto feat = room_to_features(cube_centered(), n, 64);
  const int shift = n / 4;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 64; ++c)
      CHECK(feat.seq((i + shift) % n, c) ==
            doctest::Approx(feat.seq(i, c)).epsilon(1e-9));
}

TEST_CASE("scaling the room scales distance channels, absorption unchanged") {
  RoomDescriptor room;
  room.dims = {5.0, 4.0, 3.0};
  room.absorption = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  room.listener_pos = {1.5, 2.0, 1.2};
  room.source_pos = {3.5, 1.0, 1.8};

  RoomDescriptor doubled = room;
  for (int i = 0; i < 3; ++i) {
    doubled.dims[i] *= 2.0;
    doubled.listener_pos[i] *= 2.0;
    doubled.source_pos[i] *= 2.0;
  }

  auto a = room_to_features(room, 32, 16);
  auto b = room_to_features(doubled, 32, 16);
  for (int i = 0; i < 32; ++i) {
    CHECK(b.seq(i, 0) == doctest::Approx(2.0 * a.seq(i, 0)).epsilon(1e-9));
    CHECK(b.seq(i, 2) == doctest::Approx(2.0 * a.seq(i, 2)).epsilon(1e-9));
    CHECK(b.seq(i, 1) == a.seq(i, 1));                // hit-wall absorption
    CHECK(b.seq(i, 3) == doctest::Approx(a.seq(i, 3)).epsilon(1e-9));
    CHECK(b.seq(i, 4) == doctest::Approx(a.seq(i, 4)).epsilon(1e-9));
  }
}

TEST_CASE("hit distances and wall absorptions are geometrically right") {
  RoomDescriptor room;
  room.dims = {6.0, 4.0, 3.0};
  room.absorption = {0.11, 0.22, 0.33, 0.44, 0.5, 0.5};
  room.listener_pos = {2.0, 1.0, 1.5};
  room.source_pos = {4.0, 3.0, 1.5};

  const int n = 8;
  auto feat = room_to_features(room, n, 16);
  // ray 0 points along +x: hits x=Lx at distance 4, absorption 0.22
  CHECK(feat.seq(0, 0) == doctest::Approx(4.0));
  CHECK(feat.seq(0, 1) == doctest::Approx(0.22));
  // ray n/2 points along -x: hits x=0 at distance 2, absorption 0.11
  CHECK(feat.seq(n / 2, 0) == doctest::Approx(2.0));
  CHECK(feat.seq(n / 2, 1) == doctest::Approx(0.11));
  // ray n/4 points along +y: hits y=Ly at distance 3, absorption 0.44
  CHECK(feat.seq(n / 4, 0) == doctest::Approx(3.0));
  CHECK(feat.seq(n / 4, 1) == doctest::Approx(0.44));

  CHECK_THROWS_AS(room_to_features(room, 4, 16), std::invalid_argument);
  CHECK_THROWS_AS(room_to_features(room, 16, 4), std::invalid_argument);
}
