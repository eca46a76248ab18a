// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef DEVERB_TRAINER_HPP
#define DEVERB_TRAINER_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "deverb/checkpoint.hpp"
#include "deverb/dataset.hpp"
#include "deverb/losses.hpp"
#include "deverb/model.hpp"
#include "deverb/optim.hpp"
#include "deverb/tokens.hpp"

namespace deverb {

// Thrown when a loss goes non-finite; carries the global step index.
struct NumericalError : std::runtime_error {
  long step;
  explicit NumericalError(long step_index)
      : std::runtime_error("non-finite loss at step " +
                           std::to_string(step_index)),
        step(step_index) {}
};

struct TrainConfig {
  ModelConfig model;
  StftConfig stft = StftConfig::defaults();
  LossWeights weights;
  int labeler_mels = 40;
  double lr = 1e-3;
  bool cosine_decay = false;
  int epochs = 20;
  int batch_size = 16;
  uint64_t seed = 1;
  int checkpoint_every = 0;  // epochs between periodic checkpoints; 0 = none
  int threads = 1;           // worker threads per batch; results are
                             // independent of this value given fixed order
  double val_fraction = 0.1;
  double mask_floor = kMaskFloor;
  bool magnitude_only_sp = false;
  int kmeans_iters = 30;
  uint64_t labeler_seed = 1234;
  long max_labeler_rows = 12000;
};

struct EpochStats {
  int epoch = 0;
  double train_sp = 0.0;
  double train_atm = 0.0;
  double train_total = 0.0;
  double val_total = 0.0;
};

// Spectral views of one scene, trimmed to the clean length and cached for
// the whole run.
struct PreparedSample {
  Matrix reverb_re, reverb_im;
  Matrix clean_re, clean_im;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> valid;
  GeometryFeatures features;
  std::vector<int> labels;
  long clean_len = 0;
};

PreparedSample prepare_sample(const SceneSample& scene, const StftConfig& cfg,
                              double mask_floor);

struct TrainResult {
  ModelParams params;
  AdamState adam;
  std::vector<EpochStats> history;
  PseudoLabeler labeler;
};

// Full optimization loop: seeded shuffling, per-epoch train/val losses,
// periodic checkpoints under out_dir (empty out_dir = no files).
TrainResult train_loop(const std::vector<SceneSample>& dataset,
                       const TrainConfig& cfg, const std::string& out_dir,
                       const Checkpoint* resume = nullptr);

// Sum of per-sample gradients over a batch, reduced in sample order.
// losses_out receives (sp, atm, total) per sample.
std::vector<Matrix> batch_gradients(
    const ModelParams& master, const PseudoLabeler& labeler,
    const std::vector<const PreparedSample*>& batch, const TrainConfig& cfg,
    std::vector<std::array<double, 3>>* losses_out);

void write_loss_history(const std::string& path,
                        const std::vector<EpochStats>& history);

}  // namespace deverb

#endif  // DEVERB_TRAINER_HPP
