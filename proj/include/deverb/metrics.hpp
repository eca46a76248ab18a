// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_METRICS_HPP
#define DEVERB_METRICS_HPP

#include <string>
#include <vector>

#include "deverb/dataset.hpp"
#include "deverb/model.hpp"
#include "deverb/tokens.hpp"
#include "deverb/waveform.hpp"

namespace deverb {

// RMS over frames of the per-frame RMS log-magnitude ratio in dB, with a
// spectral floor of 1e-8. Inputs are trimmed to the shorter length.
double log_spectral_distance(const Waveform& ref, const Waveform& est);

// Scale-invariant SDR in dB, capped at 100.
double si_sdr(const Waveform& ref, const Waveform& est);

// Residual reverberation time: Tikhonov-regularized deconvolution of est by
// clean, then Schroeder RT60 of the residual response. Throws when the clean
// excitation is too weak for a conditioned estimate.
double residual_rt(const Waveform& clean, const Waveform& est,
                   int sample_rate_hz = 16000);

struct EvalRow {
  int id = 0;
  std::string variant;
  double lsd_db = 0.0;
  double si_sdr_db = 0.0;
  double residual_rt_s = 0.0;
};

struct EvalAggregate {
  std::string variant;
  double lsd_db = 0.0;
  double si_sdr_db = 0.0;
  double residual_rt_s = 0.0;
  long count = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<EvalAggregate> aggregates;  // recomputed means per variant
};

struct EvalVariant {
  std::string name;
  const ModelParams* params = nullptr;  // null for reference variants
};

// Rows per sample for: the unprocessed reverberant input, each supplied
// model variant, and the oracle mask. Aggregates are appended per variant.
EvalReport eval_report(const std::vector<SceneSample>& dataset,
                       const std::vector<EvalVariant>& variants,
                       double mask_floor = kMaskFloor);

void write_eval_report(const std::string& path, const EvalReport& report);

// Dereverberate one scene with a trained model (spectrogram in, mask out,
// inverse transform back to the clean length).
Waveform dereverb_waveform(const Waveform& reverberant,
                           const GeometryFeatures& features,
                           const ModelParams& params, long out_len);

}  // namespace deverb

#endif  // DEVERB_METRICS_HPP
