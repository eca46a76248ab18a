// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace deverb {

namespace {

// Distance from (px,py) along (dx,dy) to the first wall of the rectangle
// [0,Lx]x[0,Ly], plus which wall was hit (0:x=0, 1:x=Lx, 2:y=0, 3:y=Ly).
void cast_ray(double px, double py, double dx, double dy, double lx, double ly,
              double* dist, int* wall) {
  double best = std::numeric_limits<double>::infinity();
  int hit = -1;
  if (dx < 0.0) {
    const double t = -px / dx;
    if (t < best) { best = t; hit = 0; }
  } else if (dx > 0.0) {
    const double t = (lx - px) / dx;
    if (t < best) { best = t; hit = 1; }
  }
  if (dy < 0.0) {
    const double t = -py / dy;
    if (t < best) { best = t; hit = 2; }
  } else if (dy > 0.0) {
    const double t = (ly - py) / dy;
    if (t < best) { best = t; hit = 3; }
  }
  *dist = best;
  *wall = hit;
}

}  // namespace

GeometryFeatures room_to_features(const RoomDescriptor& room, int n, int d_v) {
  room.validate();
  if (n < 8 || d_v < 8)
    throw std::invalid_argument("room_to_features: need n >= 8 and d_v >= 8");

  const double lx = room.dims[0], ly = room.dims[1];
  const double px = room.listener_pos[0], py = room.listener_pos[1];
  const double sx = room.source_pos[0] - room.listener_pos[0];
  const double sy = room.source_pos[1] - room.listener_pos[1];
  const double sz = room.source_pos[2] - room.listener_pos[2];
  const double src_dist = std::sqrt(sx * sx + sy * sy + sz * sz);
  const double src_horizontal = std::sqrt(sx * sx + sy * sy);
  const bool src_overhead = src_horizontal <= 1e-9;
  const double src_azimuth = src_overhead ? 0.0 : std::atan2(sy, sx);

  GeometryFeatures feat;
  feat.seq.resize(n, d_v);

  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n;
    const double dx = std::cos(theta), dy = std::sin(theta);

    double hit_dist = 0.0;
    int wall = -1;
    cast_ray(px, py, dx, dy, lx, ly, &hit_dist, &wall);
    const double wall_absorption = room.absorption[wall];

    // Bearing is undefined for a source straight above the listener; pin it
    // to zero there so the channel stays rotation-symmetric.
    double bearing =
        src_overhead
            ? 0.0
            : std::remainder(src_azimuth - theta, 2.0 * std::numbers::pi);

    const double scalars[4] = {hit_dist, wall_absorption, src_dist, bearing};
    feat.seq(i, 0) = hit_dist;
    feat.seq(i, 1) = wall_absorption;
    feat.seq(i, 2) = src_dist;
    feat.seq(i, 3) = std::cos(bearing);
    if (d_v > 4) feat.seq(i, 4) = std::sin(bearing);

    for (int c = 5; c < d_v; ++c) {
      const int slot = c - 5;
      const int which = slot % 4;
      const int pair = slot / 4;
      const double freq = std::pow(2.0, pair / 2) * 0.5;
      const double phase =
          (pair % 2 == 0) ? 0.0 : std::numbers::pi / 2.0;
      feat.seq(i, c) = std::sin(scalars[which] * freq + phase);
    }
  }
  return feat;
}

}  // namespace deverb
