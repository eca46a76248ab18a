// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_CHECKPOINT_HPP
#define DEVERB_CHECKPOINT_HPP

#include <optional>
#include <string>

#include "deverb/model.hpp"
#include "deverb/optim.hpp"

namespace deverb {

// Single-file checkpoint: magic, a JSON manifest (model config, named
// entries with shapes and offsets, training metadata), then one
// little-endian float64 blob in enumeration order.
struct Checkpoint {
  ModelParams params;
  std::optional<AdamState> adam;
  int epoch = 0;
  std::string variant;       // e.g. "geometry" or "no-geometry"
  uint64_t seed = 0;
  Matrix labeler_centroids;  // empty when unfitted
  uint64_t labeler_seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace deverb

#endif  // DEVERB_CHECKPOINT_HPP
