// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_GEOMETRY_HPP
#define DEVERB_GEOMETRY_HPP

#include <Eigen/Dense>

#include "deverb/room.hpp"

namespace deverb {

// N positions x D_v real features describing the room as seen from the
// listener; a deterministic stand-in for a learned panoramic encoder.
struct GeometryFeatures {
  Eigen::MatrixXd seq;

  long positions() const { return seq.rows(); }
  long feature_dims() const { return seq.cols(); }
};

// Casts n azimuthal rays from the listener at angles 2*pi*i/n in the
// horizontal plane. Per ray the features are: wall-hit distance, absorption
// of the hit wall, source distance, source bearing relative to the ray
// (cos/sin), then sinusoidal encodings of those scalars cycling over the
// remaining channels. Deterministic in the room descriptor.
GeometryFeatures room_to_features(const RoomDescriptor& room, int n, int d_v);

}  // namespace deverb

#endif  // DEVERB_GEOMETRY_HPP
