// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_DATASET_HPP
#define DEVERB_DATASET_HPP

#include <optional>
#include <string>
#include <vector>

#include "deverb/geometry.hpp"
#include "deverb/room.hpp"
#include "deverb/waveform.hpp"

namespace deverb {

struct SceneSample {
  Waveform clean;
  Waveform reverberant;  // full convolution, len(clean)+len(rir)-1
  Rir rir;
  GeometryFeatures features;
  RoomDescriptor room;
  std::optional<double> noise_snr_db;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct DatasetSpec {
  Range dim_x{4.0, 9.0};
  Range dim_y{3.0, 7.0};
  Range dim_z{2.6, 4.0};
  Range absorption{0.18, 0.55};
  double absorption_jitter = 0.15;  // relative per-wall spread
  double clip_seconds = 1.0;
  int sample_rate_hz = 16000;
  int max_order = 40;
  int feature_positions = 64;
  int feature_dims = 64;
  std::optional<double> noise_snr_db;  // per-sample additive noise
  int count = 10;
  uint64_t seed = 1;

  void validate() const;
};

// Deterministic per (seed, index); samples are independent of generation
// order.
SceneSample generate_sample(const DatasetSpec& spec, int index);
std::vector<SceneSample> dataset_generate(const DatasetSpec& spec);

// On-disk layout: one directory per sample (clean.wav, reverb.wav, rir.wav,
// room.json, features.f32) plus manifest.csv at the top level.
void save_dataset(const std::string& dir, const DatasetSpec& spec,
                  const std::vector<SceneSample>& samples);
std::vector<SceneSample> load_dataset(const std::string& dir);

void save_room_json(const std::string& path, const RoomDescriptor& room);
RoomDescriptor load_room_json(const std::string& path);

}  // namespace deverb

#endif  // DEVERB_DATASET_HPP
