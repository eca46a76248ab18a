// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

namespace deverb {

namespace {

uint64_t mix(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// forward + losses for one sample; returns (sp, atm, total) and optionally
// runs backward into the given parameter set's leaf gradients
std::array<double, 3> sample_losses(const ModelParams& params,
                                    const PseudoLabeler& labeler,
                                    const PreparedSample& s,
                                    const TrainConfig& cfg,
                                    bool run_backward) {
  Tensor rre = Tensor::constant(s.reverb_re);
  Tensor rim = Tensor::constant(s.reverb_im);
  ModelOutput out = model_forward_t(rre, rim, s.features, params);
  Tensor sp = spectrogram_loss(out.estimate, s.clean_re, s.clean_im, s.valid,
                               cfg.magnitude_only_sp);

  Tensor total;
  double atm_value = 0.0;
  if (cfg.weights.mu != 0.0) {
    Tensor est_wave =
        istft_wave(out.estimate.re, out.estimate.im, cfg.stft, s.clean_len);
    Tensor atm = atm_loss(est_wave, s.labels, labeler, params.get("atm.w"),
                          params.get("atm.b"));
    atm_value = atm.value()(0, 0);
    total = total_loss(sp, atm, cfg.weights);
  } else {
    total = scale(sp, cfg.weights.lambda);
  }

  if (run_backward) backward(total);
  return {sp.value()(0, 0), atm_value, total.value()(0, 0)};
}

}  // namespace

PreparedSample prepare_sample(const SceneSample& scene, const StftConfig& cfg,
                              double mask_floor) {
  PreparedSample p;
  p.clean_len = static_cast<long>(scene.clean.samples.size());

  Waveform reverb_trimmed = scene.reverberant;
  reverb_trimmed.samples.resize(p.clean_len);  // align with the clean clip

  ComplexSpectrogram clean_spec = stft(scene.clean, cfg);
  ComplexSpectrogram reverb_spec = stft(reverb_trimmed, cfg);

  p.clean_re = clean_spec.data.real();
  p.clean_im = clean_spec.data.imag();
  p.reverb_re = reverb_spec.data.real();
  p.reverb_im = reverb_spec.data.imag();

  ComplexMask oracle = cirm_from_pair(clean_spec, reverb_spec, mask_floor);
  p.valid = oracle.floor_hits.unaryExpr([](bool hit) { return !hit; });
  p.features = scene.features;
  return p;
}

std::vector<Matrix> batch_gradients(
    const ModelParams& master, const PseudoLabeler& labeler,
    const std::vector<const PreparedSample*>& batch, const TrainConfig& cfg,
    std::vector<std::array<double, 3>>* losses_out) {
  const int n = static_cast<int>(batch.size());
  const int workers = std::max(1, std::min(cfg.threads, n));

  std::vector<ModelParams> clones;
  clones.reserve(workers);
  for (int w = 0; w < workers; ++w) clones.push_back(master.clone());

  std::vector<std::vector<std::array<double, 3>>> losses(workers);
  auto run_shard = [&](int w) {
    for (int i = w; i < n; i += workers)
      losses[w].push_back(
          sample_losses(clones[w], labeler, *batch[i], cfg, true));
  };

  if (workers == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_shard, w);
    for (auto& t : pool) t.join();
  }

  // reduce shard gradients in worker order (fixed regardless of scheduling)
  const auto& entries = master.entries();
  std::vector<Matrix> grads;
  grads.reserve(entries.size());
  for (size_t e = 0; e < entries.size(); ++e) {
    Matrix g = clones[0].entries()[e].second.grad();
    for (int w = 1; w < workers; ++w)
      g += clones[w].entries()[e].second.grad();
    grads.push_back(std::move(g));
  }

  if (losses_out) {
    losses_out->clear();
    // restore sample order from the round-robin shards
    losses_out->resize(n);
    for (int w = 0; w < workers; ++w)
      for (size_t j = 0; j < losses[w].size(); ++j)
        (*losses_out)[w + j * workers] = losses[w][j];
  }
  return grads;
}

void write_loss_history(const std::string& path,
                        const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "epoch,train_sp,train_atm,train_total,val_total\n";
  out << std::setprecision(17);
  for (const auto& row : history) {
    out << row.epoch << "," << row.train_sp << "," << row.train_atm << ","
        << row.train_total << ",";
    if (std::isfinite(row.val_total)) out << row.val_total;
    out << "\n";
  }
}

TrainResult train_loop(const std::vector<SceneSample>& dataset,
                       const TrainConfig& cfg_in, const std::string& out_dir,
                       const Checkpoint* resume) {
  if (dataset.empty())
    throw std::invalid_argument("train_loop: empty dataset");

  TrainConfig cfg = cfg_in;
  const StftConfig& stft_cfg = cfg.stft;

  // infer data-dependent dimensions from the first sample
  cfg.model.bins = stft_cfg.bins();
  cfg.model.frames = static_cast<int>(
      stft_frame_count(static_cast<long>(dataset[0].clean.samples.size()),
                       stft_cfg));
  cfg.model.visual_len = static_cast<int>(dataset[0].features.positions());
  cfg.model.visual_dims = static_cast<int>(dataset[0].features.feature_dims());
  cfg.model.validate();

  // deterministic train/validation split: trailing fraction is validation
  const long n_total = static_cast<long>(dataset.size());
  long n_val = static_cast<long>(std::floor(cfg.val_fraction * n_total));
  n_val = std::min(n_val, n_total - 1);
  const long n_train = n_total - n_val;

  std::vector<PreparedSample> prepared;
  prepared.reserve(n_total);
  for (const auto& scene : dataset) {
    if (static_cast<long>(scene.clean.samples.size()) !=
        static_cast<long>(dataset[0].clean.samples.size()))
      throw std::invalid_argument("train_loop: inconsistent clip lengths");
    prepared.push_back(prepare_sample(scene, stft_cfg, cfg.mask_floor));
  }

  // frozen acoustic labeler fitted on clean training latents
  PseudoLabeler labeler(cfg.labeler_mels, 3, cfg.model.atm_latent_dim,
                        cfg.model.atm_classes, cfg.labeler_seed, cfg.stft);
  if (resume && resume->labeler_centroids.rows() > 0) {
    labeler.set_centroids(resume->labeler_centroids);
  } else {
    std::vector<Matrix> latent_blocks;
    long rows = 0;
    for (long i = 0; i < n_train && rows < cfg.max_labeler_rows; ++i) {
      latent_blocks.push_back(labeler.encode(dataset[i].clean));
      rows += latent_blocks.back().rows();
    }
    Matrix all(rows, cfg.model.atm_latent_dim);
    long at = 0;
    for (const auto& block : latent_blocks) {
      all.middleRows(at, block.rows()) = block;
      at += block.rows();
    }
    labeler.fit(all, mix(cfg.seed, 0xA77), cfg.kmeans_iters);
  }
  for (long i = 0; i < n_total; ++i)
    prepared[i].labels = labeler.pseudo_labels(dataset[i].clean);

  ModelParams params = resume ? resume->params.clone()
                              : ModelParams::init(cfg.model, cfg.seed);
  if (resume) {
    if (resume->params.config.frames != cfg.model.frames ||
        resume->params.config.bins != cfg.model.bins ||
        resume->params.config.visual_len != cfg.model.visual_len)
      throw std::invalid_argument(
          "train_loop: checkpoint shapes do not match the dataset");
    cfg.model = params.config;
  }
  AdamState adam = resume && resume->adam ? *resume->adam
                                          : AdamState::init(params, cfg.lr);
  const int start_epoch = resume ? resume->epoch : 0;

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::vector<EpochStats> history;
  long global_step = static_cast<long>(adam.step);

  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    if (cfg.cosine_decay)
      adam.lr = cfg.lr * 0.5 *
                (1.0 + std::cos(std::numbers::pi * epoch /
                                std::max(1, cfg.epochs)));

    std::vector<long> perm(n_train);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(mix(cfg.seed, 0xE60C + epoch));
    std::shuffle(perm.begin(), perm.end(), rng);

    EpochStats stats;
    stats.epoch = epoch;
    long seen = 0;
    for (long b0 = 0; b0 < n_train; b0 += cfg.batch_size) {
      const long b1 = std::min<long>(b0 + cfg.batch_size, n_train);
      std::vector<const PreparedSample*> batch;
      for (long i = b0; i < b1; ++i) batch.push_back(&prepared[perm[i]]);

      std::vector<std::array<double, 3>> losses;
      std::vector<Matrix> grads =
          batch_gradients(params, labeler, batch, cfg, &losses);
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (auto& g : grads) g *= inv;

      for (const auto& l : losses) {
        if (!std::isfinite(l[2])) throw NumericalError(global_step);
        stats.train_sp += l[0];
        stats.train_atm += l[1];
        stats.train_total += l[2];
      }
      seen += static_cast<long>(batch.size());
      adam_step(params, grads, adam);
      ++global_step;
    }
    stats.train_sp /= seen;
    stats.train_atm /= seen;
    stats.train_total /= seen;

    if (n_val > 0) {
      double val = 0.0;
      for (long i = n_train; i < n_total; ++i) {
        auto l = sample_losses(params, labeler, prepared[i], cfg, false);
        val += l[2];
      }
      stats.val_total = val / static_cast<double>(n_val);
      if (!std::isfinite(stats.val_total)) throw NumericalError(global_step);
    } else {
      stats.val_total = std::numeric_limits<double>::quiet_NaN();
    }
    history.push_back(stats);

    if (!out_dir.empty()) {
      write_loss_history(out_dir + "/loss_history.csv", history);
      const bool periodic =
          cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0;
      if (periodic || epoch + 1 == cfg.epochs) {
        Checkpoint ckpt;
        ckpt.params = params.clone();
        ckpt.adam = adam;
        ckpt.epoch = epoch + 1;
        ckpt.variant = cfg.model.use_geometry ? "geometry" : "no-geometry";
        ckpt.seed = cfg.seed;
        ckpt.labeler_centroids = labeler.centroids();
        ckpt.labeler_seed = cfg.labeler_seed;
        const std::string name =
            periodic && epoch + 1 != cfg.epochs
                ? out_dir + "/ckpt_epoch_" + std::to_string(epoch + 1) + ".dvk"
                : out_dir + "/final.dvk";
        save_checkpoint(name, ckpt);
      }
    }
  }

  TrainResult result{std::move(params), std::move(adam), std::move(history),
                     std::move(labeler)};
  return result;
}

}  // namespace deverb
