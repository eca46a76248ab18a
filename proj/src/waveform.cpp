// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace deverb {

double Waveform::energy() const {
  double e = 0.0;
  for (double s : samples) e += s * s;
  return e;
}

void Waveform::validate() const {
  if (sample_rate_hz <= 0)
    throw std::invalid_argument("waveform: sample_rate_hz must be positive");
  for (double s : samples)
    if (!std::isfinite(s))
      throw std::invalid_argument("waveform: non-finite sample");
}

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("wav: truncated file");
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void expect_tag(std::istream& in, const char* tag) {
  char buf[4];
  in.read(buf, 4);
  if (!in || std::memcmp(buf, tag, 4) != 0)
    throw std::runtime_error(std::string("wav: missing chunk '") + tag + "'");
}

}  // namespace

Waveform read_wav(const std::string& path, int expected_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open " + path);

  expect_tag(in, "RIFF");
  read_le<uint32_t>(in);  // riff size, unused
  expect_tag(in, "WAVE");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  Waveform wave;

  while (in.peek() != EOF) {
    char tag[4];
    in.read(tag, 4);
    if (!in) break;
    auto size = read_le<uint32_t>(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_le<uint16_t>(in);
      channels = read_le<uint16_t>(in);
      rate = read_le<uint32_t>(in);
      read_le<uint32_t>(in);  // byte rate
      read_le<uint16_t>(in);  // block align
      bits = read_le<uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw std::runtime_error("wav: data before fmt chunk");
      if (channels != 1) throw std::runtime_error("wav: mono required");
      if (static_cast<int>(rate) != expected_rate_hz)
        throw std::runtime_error("wav: sample rate " + std::to_string(rate) +
                                 " Hz, expected " +
                                 std::to_string(expected_rate_hz) +
                                 " Hz (no resampling)");
      if (format == kFormatPcm && bits == 16) {
        size_t n = size / 2;
        wave.samples.resize(n);
        for (size_t i = 0; i < n; ++i)
          wave.samples[i] = read_le<int16_t>(in) / 32768.0;
      } else if (format == kFormatFloat && bits == 32) {
        size_t n = size / 4;
        wave.samples.resize(n);
        for (size_t i = 0; i < n; ++i)
          wave.samples[i] = read_le<float>(in);
      } else {
        throw std::runtime_error("wav: unsupported encoding (PCM16 or float32)");
      }
      wave.sample_rate_hz = static_cast<int>(rate);
      return wave;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  throw std::runtime_error("wav: no data chunk in " + path);
}

void write_wav(const std::string& path, const Waveform& wave,
               WavFormat format) {
  wave.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("wav: cannot write " + path);

  const uint16_t fmt_tag = format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat;
  const uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const uint32_t rate = static_cast<uint32_t>(wave.sample_rate_hz);
  const uint32_t data_size =
      static_cast<uint32_t>(wave.samples.size()) * (bits / 8);

  out.write("RIFF", 4);
  write_le<uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<uint32_t>(out, 16);
  write_le<uint16_t>(out, fmt_tag);
  write_le<uint16_t>(out, 1);  // mono
  write_le<uint32_t>(out, rate);
  write_le<uint32_t>(out, rate * (bits / 8));
  write_le<uint16_t>(out, bits / 8);
  write_le<uint16_t>(out, bits);
  out.write("data", 4);
  write_le<uint32_t>(out, data_size);

  if (format == WavFormat::kPcm16) {
    for (double s : wave.samples) {
      double clamped = std::clamp(s, -1.0, 1.0);
      auto q = static_cast<int16_t>(std::lround(clamped * 32767.0));
      write_le<int16_t>(out, q);
    }
  } else {
    for (double s : wave.samples) write_le<float>(out, static_cast<float>(s));
  }
  if (!out) throw std::runtime_error("wav: write failed for " + path);
}

}  // namespace deverb
