// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "deverb/speechlike.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace deverb {

namespace {

// splitmix64: decorrelates (seed, index) into an independent stream seed
uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double sample_range(std::mt19937_64& rng, const Range& r) {
  std::uniform_real_distribution<double> d(r.lo, r.hi);
  return d(rng);
}

}  // namespace

void DatasetSpec::validate() const {
  auto check_range = [](const Range& r, const char* name, double min_lo) {
    if (!(r.lo <= r.hi))
      throw std::invalid_argument(std::string("dataset spec: ") + name +
                                  " range is empty");
    if (!(r.lo >= min_lo))
      throw std::invalid_argument(std::string("dataset spec: ") + name +
                                  " range below minimum");
  };
  // rooms must admit source/listener placement with wall clearance
  const double min_dim = 2.0 * RoomDescriptor::kWallClearance + 0.3;
  check_range(dim_x, "dims", min_dim);
  check_range(dim_y, "dims", min_dim);
  check_range(dim_z, "dims", min_dim);
  check_range(absorption, "absorption", 1e-6);
  if (absorption.hi > 1.0)
    throw std::invalid_argument("dataset spec: absorption range above 1");
  if (absorption_jitter < 0.0 || absorption_jitter >= 1.0)
    throw std::invalid_argument("dataset spec: absorption_jitter in [0,1)");
  if (clip_seconds <= 0.05)
    throw std::invalid_argument("dataset spec: clip_seconds too short");
  if (count < 1) throw std::invalid_argument("dataset spec: count >= 1");
  if (max_order < 0) throw std::invalid_argument("dataset spec: max_order >= 0");
  if (feature_positions < 8 || feature_dims < 8)
    throw std::invalid_argument("dataset spec: feature dims below minimum");
  if (noise_snr_db && !(*noise_snr_db > -40.0))
    throw std::invalid_argument("dataset spec: noise_snr_db out of range");
}

SceneSample generate_sample(const DatasetSpec& spec, int index) {
  spec.validate();
  const uint64_t stream = mix_seed(spec.seed, static_cast<uint64_t>(index));
  std::mt19937_64 rng(stream);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  RoomDescriptor room;
  room.dims = {sample_range(rng, spec.dim_x), sample_range(rng, spec.dim_y),
               sample_range(rng, spec.dim_z)};
  const double base_alpha = sample_range(rng, spec.absorption);
  for (int w = 0; w < 6; ++w) {
    const double jitter =
        1.0 + spec.absorption_jitter * (2.0 * uni(rng) - 1.0);
    room.absorption[w] = std::clamp(base_alpha * jitter, 0.01, 1.0);
  }
  const double margin = RoomDescriptor::kWallClearance + 0.15;
  auto place = [&](std::array<double, 3>& p) {
    for (int i = 0; i < 3; ++i) {
      const double lo = margin, hi = room.dims[i] - margin;
      p[i] = lo + (hi - lo) * uni(rng);
    }
  };
  place(room.source_pos);
  place(room.listener_pos);
  // keep the pair at least 0.5 m apart for a sane direct path
  for (int attempt = 0; attempt < 64 && room.direct_distance() < 0.5;
       ++attempt)
    place(room.listener_pos);
  room.max_order = spec.max_order;

  SceneSample sample;
  sample.room = room;
  sample.rir = image_source_rir(room, spec.sample_rate_hz);
  sample.clean =
      synth_speech_like(spec.clip_seconds, spec.sample_rate_hz, mix_seed(stream, 7));
  sample.reverberant = convolve_rir(sample.clean, sample.rir);
  if (spec.noise_snr_db) {
    sample.reverberant =
        add_noise(sample.reverberant, *spec.noise_snr_db, mix_seed(stream, 11));
    sample.noise_snr_db = spec.noise_snr_db;
  }
  sample.features =
      room_to_features(room, spec.feature_positions, spec.feature_dims);
  return sample;
}

std::vector<SceneSample> dataset_generate(const DatasetSpec& spec) {
  spec.validate();
  std::vector<SceneSample> samples;
  samples.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i)
    samples.push_back(generate_sample(spec, i));
  return samples;
}

void save_room_json(const std::string& path, const RoomDescriptor& room) {
  json j;
  j["dims_m"] = {room.dims[0], room.dims[1], room.dims[2]};
  j["absorption"] = room.absorption;
  j["source_pos_m"] = room.source_pos;
  j["listener_pos_m"] = room.listener_pos;
  j["max_order"] = room.max_order;
  j["speed_of_sound_mps"] = room.speed_of_sound;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

RoomDescriptor load_room_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  RoomDescriptor room;
  for (int i = 0; i < 3; ++i) {
    room.dims[i] = j.at("dims_m").at(i).get<double>();
    room.source_pos[i] = j.at("source_pos_m").at(i).get<double>();
    room.listener_pos[i] = j.at("listener_pos_m").at(i).get<double>();
  }
  for (int i = 0; i < 6; ++i)
    room.absorption[i] = j.at("absorption").at(i).get<double>();
  room.max_order = j.value("max_order", room.max_order);
  room.speed_of_sound = j.value("speed_of_sound_mps", room.speed_of_sound);
  room.validate();
  return room;
}

namespace {

void write_features_f32(const std::string& path, const GeometryFeatures& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (long i = 0; i < f.seq.rows(); ++i)
    for (long j = 0; j < f.seq.cols(); ++j) {
      const float v = static_cast<float>(f.seq(i, j));
      out.write(reinterpret_cast<const char*>(&v), sizeof(float));
    }
}

GeometryFeatures read_features_f32(const std::string& path, long n, long d) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  GeometryFeatures f;
  f.seq.resize(n, d);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < d; ++j) {
      float v = 0.0f;
      in.read(reinterpret_cast<char*>(&v), sizeof(float));
      if (!in) throw std::runtime_error("features.f32 truncated: " + path);
      f.seq(i, j) = v;
    }
  return f;
}

std::string sample_dir_name(int index) {
  std::ostringstream os;
  os << "sample_" << std::setw(5) << std::setfill('0') << index;
  return os.str();
}

}  // namespace

void save_dataset(const std::string& dir, const DatasetSpec& spec,
                  const std::vector<SceneSample>& samples) {
  fs::create_directories(dir);

  json meta;
  meta["count"] = samples.size();
  meta["seed"] = spec.seed;
  meta["clip_seconds"] = spec.clip_seconds;
  meta["sample_rate_hz"] = spec.sample_rate_hz;
  meta["feature_positions"] = spec.feature_positions;
  meta["feature_dims"] = spec.feature_dims;
  if (spec.noise_snr_db) meta["noise_snr_db"] = *spec.noise_snr_db;
  {
    std::ofstream out(dir + "/dataset.json");
    out << meta.dump(2) << "\n";
  }

  std::ofstream manifest(dir + "/manifest.csv");
  if (!manifest) throw std::runtime_error("cannot write manifest.csv");
  manifest << "id,dim_x,dim_y,dim_z,alpha_x0,alpha_x1,alpha_y0,alpha_y1,"
              "alpha_z0,alpha_z1,rt60_s,seed\n";
  manifest << std::setprecision(17);

  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string sdir = dir + "/" + sample_dir_name(static_cast<int>(i));
    fs::create_directories(sdir);
    write_wav(sdir + "/clean.wav", s.clean, WavFormat::kFloat32);
    write_wav(sdir + "/reverb.wav", s.reverberant, WavFormat::kFloat32);
    write_wav(sdir + "/rir.wav", s.rir.samples.empty()
                                     ? Waveform{{0.0}, s.rir.sample_rate_hz}
                                     : Waveform{s.rir.samples, s.rir.sample_rate_hz},
              WavFormat::kFloat32);
    save_room_json(sdir + "/room.json", s.room);
    write_features_f32(sdir + "/features.f32", s.features);

    double rt = 0.0;
    try {
      rt = rt60_schroeder(s.rir);
    } catch (const std::exception&) {
      rt = 0.0;  // degenerate response; record zero
    }
    manifest << i;
    for (int d = 0; d < 3; ++d) manifest << "," << s.room.dims[d];
    for (int w = 0; w < 6; ++w) manifest << "," << s.room.absorption[w];
    manifest << "," << rt << "," << spec.seed << "\n";
  }
}

std::vector<SceneSample> load_dataset(const std::string& dir) {
  std::ifstream meta_in(dir + "/dataset.json");
  if (!meta_in)
    throw std::runtime_error("load_dataset: missing dataset.json in " + dir);
  json meta;
  meta_in >> meta;
  const int count = meta.at("count").get<int>();
  const int rate = meta.value("sample_rate_hz", 16000);
  const long n = meta.value("feature_positions", 64);
  const long d = meta.value("feature_dims", 64);

  std::vector<SceneSample> samples;
  samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::string sdir = dir + "/" + sample_dir_name(i);
    SceneSample s;
    s.clean = read_wav(sdir + "/clean.wav", rate);
    s.reverberant = read_wav(sdir + "/reverb.wav", rate);
    Waveform rir_wave = read_wav(sdir + "/rir.wav", rate);
    s.rir.samples = std::move(rir_wave.samples);
    s.rir.sample_rate_hz = rate;
    s.room = load_room_json(sdir + "/room.json");
    s.features = read_features_f32(sdir + "/features.f32", n, d);
    if (meta.contains("noise_snr_db"))
      s.noise_snr_db = meta["noise_snr_db"].get<double>();
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace deverb
