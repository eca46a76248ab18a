// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>

#include "deverb/cirm.hpp"
#include "deverb/fft.hpp"
#include "deverb/stft.hpp"

namespace deverb {

namespace {

constexpr double kSpectralFloor = 1e-8;
constexpr double kSiSdrCap = 100.0;

Waveform trimmed(const Waveform& w, long len) {
  Waveform out = w;
  out.samples.resize(len);
  return out;
}

}  // namespace

double log_spectral_distance(const Waveform& ref, const Waveform& est) {
  if (ref.sample_rate_hz != est.sample_rate_hz)
    throw std::invalid_argument("lsd: sample-rate mismatch");
  const long len = std::min(ref.samples.size(), est.samples.size());
  if (len == 0) throw std::invalid_argument("lsd: empty input");

  Waveform r = trimmed(ref, len), e = trimmed(est, len);
  if (!(r.energy() > 0.0))
    throw std::invalid_argument("lsd: silent reference");

  const StftConfig cfg = StftConfig::defaults();
  ComplexSpectrogram sr = stft(r, cfg), se = stft(e, cfg);

  // RMS over frames of the per-frame RMS log-magnitude deviation
  double sq = 0.0;
  for (long t = 0; t < sr.frames(); ++t) {
    double bin_acc = 0.0;
    for (long f = 0; f < sr.bins(); ++f) {
      const double mr = std::max(std::abs(sr.data(t, f)), kSpectralFloor);
      const double me = std::max(std::abs(se.data(t, f)), kSpectralFloor);
      const double d = 20.0 * std::log10(mr / me);
      bin_acc += d * d;
    }
    sq += bin_acc / sr.bins();
  }
  return std::sqrt(sq / sr.frames());
}

double si_sdr(const Waveform& ref, const Waveform& est) {
  const long len = std::min(ref.samples.size(), est.samples.size());
  if (len == 0) throw std::invalid_argument("si_sdr: empty input");
  double dot = 0.0, ref_e = 0.0, est_e = 0.0;
  for (long i = 0; i < len; ++i) {
    dot += est.samples[i] * ref.samples[i];
    ref_e += ref.samples[i] * ref.samples[i];
    est_e += est.samples[i] * est.samples[i];
  }
  if (!(ref_e > 0.0) || !(est_e > 0.0))
    throw std::invalid_argument("si_sdr: zero-energy input");

  const double alpha = dot / ref_e;
  double target_e = 0.0, resid_e = 0.0;
  for (long i = 0; i < len; ++i) {
    const double t = alpha * ref.samples[i];
    const double r = est.samples[i] - t;
    target_e += t * t;
    resid_e += r * r;
  }
  if (resid_e <= 0.0 || target_e / resid_e > std::pow(10.0, kSiSdrCap / 10.0))
    return kSiSdrCap;
  return 10.0 * std::log10(target_e / resid_e);
}

double residual_rt(const Waveform& clean, const Waveform& est,
                   int sample_rate_hz) {
  if (clean.samples.empty() || est.samples.empty())
    throw std::invalid_argument("residual_rt: empty input");
  const long nc = static_cast<long>(clean.samples.size());
  const long ne = static_cast<long>(est.samples.size());
  const long nfft = next_power_of_two(nc + ne);

  std::vector<std::complex<double>> fc(nfft, {0.0, 0.0}), fe(nfft, {0.0, 0.0});
  for (long i = 0; i < nc; ++i) fc[i] = {clean.samples[i], 0.0};
  for (long i = 0; i < ne; ++i) fe[i] = {est.samples[i], 0.0};
  fft_inplace(fc, false);
  fft_inplace(fe, false);

  double peak_power = 0.0;
  for (const auto& v : fc) peak_power = std::max(peak_power, std::norm(v));
  if (!(peak_power > 0.0))
    throw std::invalid_argument("residual_rt: silent clean reference");

  // sanity check on the excitation: the regularizer must not dominate a
  // large share of the band, or the division is meaningless
  const double reg = 1e-6 * peak_power;
  long weak = 0;
  for (const auto& v : fc)
    if (std::norm(v) < reg * 10.0) ++weak;
  if (weak > nfft / 2)
    throw std::invalid_argument(
        "residual_rt: clean excitation below threshold, deconvolution "
        "ill-conditioned");

  std::vector<std::complex<double>> h(nfft);
  for (long k = 0; k < nfft; ++k)
    h[k] = fe[k] * std::conj(fc[k]) / (std::norm(fc[k]) + reg);
  fft_inplace(h, true);

  // keep the causal part covering the estimate
  const long span = std::min<long>(ne, nfft);
  Rir residual;
  residual.sample_rate_hz = sample_rate_hz;
  residual.samples.resize(span);
  for (long i = 0; i < span; ++i) residual.samples[i] = h[i].real();
  return rt60_schroeder(residual);
}

Waveform dereverb_waveform(const Waveform& reverberant,
                           const GeometryFeatures& features,
                           const ModelParams& params, long out_len) {
  const StftConfig cfg = StftConfig::defaults();
  const ModelConfig& mc = params.config;
  const long want = static_cast<long>(mc.frames - 1) * cfg.hop + cfg.win_len;

  // process in fixed-length chunks matching the model's frame count
  Waveform out;
  out.sample_rate_hz = reverberant.sample_rate_hz;
  out.samples.assign(out_len, 0.0);

  long pos = 0;
  while (pos < out_len) {
    Waveform chunk;
    chunk.sample_rate_hz = reverberant.sample_rate_hz;
    chunk.samples.assign(want, 0.0);
    for (long i = 0; i < want; ++i)
      if (pos + i < static_cast<long>(reverberant.samples.size()))
        chunk.samples[i] = reverberant.samples[pos + i];

    ComplexSpectrogram spec = stft(chunk, cfg);
    InferenceResult inf = model_forward(spec, features, params);
    Waveform est_wave = istft(inf.estimate, cfg, want);

    const long n = std::min(want, out_len - pos);
    for (long i = 0; i < n; ++i) out.samples[pos + i] = est_wave.samples[i];
    pos += want;
  }
  return out;
}

EvalReport eval_report(const std::vector<SceneSample>& dataset,
                       const std::vector<EvalVariant>& variants,
                       double mask_floor) {
  if (dataset.empty()) throw std::invalid_argument("eval_report: empty dataset");
  const StftConfig cfg = StftConfig::defaults();
  EvalReport report;

  for (size_t i = 0; i < dataset.size(); ++i) {
    const SceneSample& scene = dataset[i];
    const long clean_len = static_cast<long>(scene.clean.samples.size());
    Waveform reverb_trim = trimmed(scene.reverberant, clean_len);

    auto add_row = [&](const std::string& variant, const Waveform& est) {
      EvalRow row;
      row.id = static_cast<int>(i);
      row.variant = variant;
      row.lsd_db = log_spectral_distance(scene.clean, est);
      row.si_sdr_db = si_sdr(scene.clean, est);
      row.residual_rt_s = residual_rt(scene.clean, est);
      report.rows.push_back(row);
    };

    add_row("reverberant", reverb_trim);

    for (const auto& variant : variants) {
      if (!variant.params)
        throw std::invalid_argument("eval_report: missing checkpoint for " +
                                    variant.name);
      add_row(variant.name, dereverb_waveform(reverb_trim, scene.features,
                                              *variant.params, clean_len));
    }

    // oracle mask: ground-truth cIRM applied to the reverberant input
    ComplexSpectrogram clean_spec = stft(scene.clean, cfg);
    ComplexSpectrogram reverb_spec = stft(reverb_trim, cfg);
    ComplexMask oracle = cirm_from_pair(clean_spec, reverb_spec, mask_floor);
    Waveform oracle_wave =
        istft(apply_mask(oracle, reverb_spec), cfg, clean_len);
    add_row("oracle-cirm", oracle_wave);
  }

  // aggregates recomputed from rows, keyed by variant in first-seen order
  std::vector<std::string> order;
  std::map<std::string, EvalAggregate> agg;
  for (const auto& row : report.rows) {
    if (!agg.count(row.variant)) {
      order.push_back(row.variant);
      agg[row.variant].variant = row.variant;
    }
    auto& a = agg[row.variant];
    a.lsd_db += row.lsd_db;
    a.si_sdr_db += row.si_sdr_db;
    a.residual_rt_s += row.residual_rt_s;
    a.count += 1;
  }
  for (const auto& name : order) {
    EvalAggregate a = agg[name];
    a.lsd_db /= a.count;
    a.si_sdr_db /= a.count;
    a.residual_rt_s /= a.count;
    report.aggregates.push_back(a);
  }
  return report;
}

void write_eval_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  out << "kind,id,variant,lsd_db,si_sdr_db,residual_rt_s\n";
  for (const auto& row : report.rows)
    out << "row," << row.id << "," << row.variant << "," << row.lsd_db << ","
        << row.si_sdr_db << "," << row.residual_rt_s << "\n";
  for (const auto& a : report.aggregates)
    out << "aggregate,," << a.variant << "," << a.lsd_db << "," << a.si_sdr_db
        << "," << a.residual_rt_s << "\n";
}

}  // namespace deverb
