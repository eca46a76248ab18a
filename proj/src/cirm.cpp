// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/cirm.hpp"

#include <cmath>
#include <stdexcept>

namespace deverb {

ComplexMask cirm_from_pair(const ComplexSpectrogram& clean,
                           const ComplexSpectrogram& reverb, double floor) {
  if (clean.data.rows() != reverb.data.rows() ||
      clean.data.cols() != reverb.data.cols())
    throw std::invalid_argument("cirm_from_pair: shape mismatch");
  if (!(floor > 0.0))
    throw std::invalid_argument("cirm_from_pair: floor must be positive");

  ComplexMask mask;
  mask.data.resize(clean.data.rows(), clean.data.cols());
  mask.floor_hits.resize(clean.data.rows(), clean.data.cols());
  for (long t = 0; t < clean.data.rows(); ++t) {
    for (long f = 0; f < clean.data.cols(); ++f) {
      const std::complex<double> s = clean.data(t, f);
      const std::complex<double> r = reverb.data(t, f);
      const double power = std::norm(r);  // r.r^2 + r.i^2
      const bool floored = power < floor;
      mask.floor_hits(t, f) = floored;
      mask.data(t, f) = s * std::conj(r) / std::max(power, floor);
    }
  }
  return mask;
}

ComplexSpectrogram apply_mask(const ComplexMask& mask,
                              const ComplexSpectrogram& reverb) {
  if (mask.data.rows() != reverb.data.rows() ||
      mask.data.cols() != reverb.data.cols())
    throw std::invalid_argument("apply_mask: shape mismatch");
  ComplexSpectrogram out = reverb;
  out.data = mask.data.cwiseProduct(reverb.data);
  return out;
}

ComplexMask compress_mask(const ComplexMask& mask, double k) {
  ComplexMask out = mask;
  for (long t = 0; t < mask.data.rows(); ++t)
    for (long f = 0; f < mask.data.cols(); ++f) {
      const auto v = mask.data(t, f);
      out.data(t, f) = {k * std::tanh(v.real() / k),
                        k * std::tanh(v.imag() / k)};
    }
  return out;
}

ComplexMask decompress_mask(const ComplexMask& mask, double k) {
  ComplexMask out = mask;
  for (long t = 0; t < mask.data.rows(); ++t)
    for (long f = 0; f < mask.data.cols(); ++f) {
      const auto v = mask.data(t, f);
      if (std::abs(v.real()) >= k || std::abs(v.imag()) >= k)
        throw std::invalid_argument(
            "decompress_mask: value magnitude reaches the bound K");
      out.data(t, f) = {k * std::atanh(v.real() / k),
                        k * std::atanh(v.imag() / k)};
    }
  return out;
}

}  // namespace deverb
