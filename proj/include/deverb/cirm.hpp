// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_CIRM_HPP
#define DEVERB_CIRM_HPP

#include <Eigen/Dense>

#include "deverb/stft.hpp"

namespace deverb {

// Complex ratio mask over a T x F grid. floor_hits marks bins where the
// denominator power floor was applied; those bins are excluded from
// training losses.
struct ComplexMask {
  Eigen::MatrixXcd data;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> floor_hits;

  long frames() const { return data.rows(); }
  long bins() const { return data.cols(); }
};

constexpr double kMaskFloor = 1e-8;
constexpr double kMaskCompressK = 10.0;

// C = clean * conj(reverb) / max(|reverb|^2, floor). Multiplying the
// reverberant spectrogram by C reproduces the clean one wherever the floor
// was not hit.
ComplexMask cirm_from_pair(const ComplexSpectrogram& clean,
                           const ComplexSpectrogram& reverb,
                           double floor = kMaskFloor);

// Elementwise complex multiplication of mask and reverberant spectrogram.
ComplexSpectrogram apply_mask(const ComplexMask& mask,
                              const ComplexSpectrogram& reverb);

// Bounded compression per real/imaginary part: x -> K tanh(x/K).
ComplexMask compress_mask(const ComplexMask& mask, double k = kMaskCompressK);
// Exact inverse on (-K, K); throws when a part reaches K in magnitude.
ComplexMask decompress_mask(const ComplexMask& mask,
                            double k = kMaskCompressK);

}  // namespace deverb

#endif  // DEVERB_CIRM_HPP
