// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "deverb/checkpoint.hpp"
#include "deverb/dataset.hpp"
#include "deverb/metrics.hpp"
#include "deverb/trainer.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace deverb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

[[noreturn]] void fail(int code, const std::string& reason) {
  std::cerr << "error: " << reason << "\n";
  std::exit(code);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitUsage, "config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(kExitUsage, std::string("config: ") + e.what());
  }
  return j;
}

DatasetSpec dataset_spec_from_json(const json& j) {
  DatasetSpec spec;
  auto range = [&](const char* key, Range fallback) -> Range {
    if (!j.contains(key)) return fallback;
    return Range{j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
  };
  spec.dim_x = range("dim_x", spec.dim_x);
  spec.dim_y = range("dim_y", spec.dim_y);
  spec.dim_z = range("dim_z", spec.dim_z);
  spec.absorption = range("absorption", spec.absorption);
  spec.absorption_jitter = j.value("absorption_jitter", spec.absorption_jitter);
  spec.clip_seconds = j.value("clip_seconds", spec.clip_seconds);
  spec.max_order = j.value("max_order", spec.max_order);
  spec.feature_positions = j.value("feature_positions", spec.feature_positions);
  spec.feature_dims = j.value("feature_dims", spec.feature_dims);
  spec.count = j.value("count", spec.count);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("noise_snr_db"))
    spec.noise_snr_db = j.at("noise_snr_db").get<double>();
  return spec;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.cosine_decay = j.value("cosine_decay", cfg.cosine_decay);
  cfg.weights.lambda = j.value("lambda", cfg.weights.lambda);
  cfg.weights.mu = j.value("mu", cfg.weights.mu);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
  cfg.magnitude_only_sp = j.value("magnitude_only_sp", cfg.magnitude_only_sp);
  cfg.kmeans_iters = j.value("kmeans_iters", cfg.kmeans_iters);
  cfg.labeler_seed = j.value("labeler_seed", cfg.labeler_seed);
  if (j.contains("model")) {
    const json& m = j["model"];
    cfg.model.d_model = m.value("d_model", cfg.model.d_model);
    cfg.model.n_window = m.value("n_window", cfg.model.n_window);
    cfg.model.loops = m.value("loops", cfg.model.loops);
    cfg.model.heads = m.value("heads", cfg.model.heads);
    cfg.model.conv_kernel = m.value("conv_kernel", cfg.model.conv_kernel);
    cfg.model.dec_conv_kernel =
        m.value("dec_conv_kernel", cfg.model.dec_conv_kernel);
    cfg.model.use_geometry = m.value("use_geometry", cfg.model.use_geometry);
    cfg.model.atm_latent_dim =
        m.value("atm_latent_dim", cfg.model.atm_latent_dim);
    cfg.model.atm_classes = m.value("atm_classes", cfg.model.atm_classes);
  }
  return cfg;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir,
                 std::optional<uint64_t> seed_override) {
  DatasetSpec spec = dataset_spec_from_json(load_json(config_path));
  if (seed_override) spec.seed = *seed_override;
  try {
    spec.validate();
    auto samples = dataset_generate(spec);
    save_dataset(out_dir, spec, samples);
  } catch (const std::exception& e) {
    fail(kExitUsage, e.what());
  }
  std::cout << "wrote " << spec.count << " samples to " << out_dir << "\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, bool no_geometry,
              std::optional<double> mu, std::optional<double> lambda,
              std::optional<uint64_t> seed, std::optional<int> threads,
              bool deterministic, const std::string& resume_path) {
  TrainConfig cfg = train_config_from_json(load_json(config_path));
  if (no_geometry) cfg.model.use_geometry = false;
  if (mu) cfg.weights.mu = *mu;
  if (lambda) cfg.weights.lambda = *lambda;
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  if (deterministic) cfg.threads = 1;

  if (!fs::exists(data_dir + "/dataset.json"))
    fail(kExitUsage, "dataset: missing " + data_dir + "/dataset.json");

  std::vector<SceneSample> dataset;
  try {
    dataset = load_dataset(data_dir);
  } catch (const std::exception& e) {
    fail(kExitUsage, std::string("dataset: ") + e.what());
  }

  std::optional<Checkpoint> resume;
  if (!resume_path.empty()) {
    try {
      resume = load_checkpoint(resume_path);
    } catch (const std::exception& e) {
      fail(kExitUsage, std::string("checkpoint: ") + e.what());
    }
  }

  try {
    TrainResult result = train_loop(dataset, cfg, out_dir,
                                    resume ? &*resume : nullptr);
    std::cout << "trained " << result.history.size() << " epochs; final "
              << (result.history.empty() ? 0.0
                                         : result.history.back().train_total)
              << "\n";
  } catch (const NumericalError& e) {
    fail(kExitNumerical, e.what());
  } catch (const std::exception& e) {
    fail(kExitUsage, e.what());
  }
  return kExitOk;
}

int cmd_dereverb(const std::string& in_wav, const std::string& room_json,
                 const std::string& ckpt_path, const std::string& out_wav) {
  try {
    Waveform input = read_wav(in_wav, 16000);
    RoomDescriptor room = load_room_json(room_json);
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    ckpt.params.config.validate();
    GeometryFeatures features =
        room_to_features(room, ckpt.params.config.visual_len,
                         ckpt.params.config.visual_dims);
    Waveform out = dereverb_waveform(input, features, ckpt.params,
                                     static_cast<long>(input.samples.size()));
    write_wav(out_wav, out, WavFormat::kFloat32);
    std::cout << "wrote " << out_wav << " (" << out.samples.size()
              << " samples)\n";
  } catch (const std::exception& e) {
    fail(kExitUsage, e.what());
  }
  return kExitOk;
}

int cmd_eval(const std::string& data_dir,
             const std::vector<std::string>& ckpt_paths,
             const std::string& out_csv) {
  try {
    std::vector<SceneSample> dataset = load_dataset(data_dir);
    std::vector<Checkpoint> ckpts;
    ckpts.reserve(ckpt_paths.size());
    std::vector<EvalVariant> variants;
    for (const auto& path : ckpt_paths) {
      ckpts.push_back(load_checkpoint(path));
      EvalVariant v;
      v.name = ckpts.back().variant.empty()
                   ? fs::path(path).stem().string()
                   : ckpts.back().variant;
      variants.push_back(v);
    }
    for (size_t i = 0; i < ckpts.size(); ++i)
      variants[i].params = &ckpts[i].params;
    EvalReport report = eval_report(dataset, variants);
    write_eval_report(out_csv, report);
    std::cout << "wrote " << report.rows.size() << " rows to " << out_csv
              << "\n";
  } catch (const std::exception& e) {
    fail(kExitUsage, e.what());
  }
  return kExitOk;
}

int cmd_plot_data(const std::string& train_dir, const std::string& eval_csv,
                  const std::string& out_dir) {
  try {
    fs::create_directories(out_dir);

    const std::string loss_path = train_dir + "/loss_history.csv";
    if (!fs::exists(loss_path))
      throw std::runtime_error("missing " + loss_path);
    {
      std::ifstream in(loss_path);
      std::ofstream out(out_dir + "/plot_loss_curves.csv");
      out << "# per-epoch loss curves; columns: epoch, train_sp, train_atm, "
             "train_total, val_total\n";
      std::string line;
      std::getline(in, line);  // drop original header
      while (std::getline(in, line)) out << line << "\n";
    }

    if (!eval_csv.empty()) {
      std::ifstream in(eval_csv);
      if (!in) throw std::runtime_error("missing " + eval_csv);
      std::ofstream out(out_dir + "/plot_metric_scatter.csv");
      out << "# per-sample metric scatter; columns: id, variant, lsd_db, "
             "si_sdr_db, residual_rt_s\n";
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.rfind("row,", 0) == 0) out << line.substr(4) << "\n";
      }
    }
    std::cout << "wrote plot data to " << out_dir << "\n";
  } catch (const std::exception& e) {
    fail(kExitUsage, e.what());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometry-conditioned speech dereverberation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_dir, in_wav, room_json, ckpt_path;
  std::string resume_path, eval_csv, train_dir;
  std::vector<std::string> ckpt_paths;
  std::optional<uint64_t> seed;
  std::optional<double> mu, lambda;
  std::optional<int> threads;
  bool no_geometry = false, deterministic = false;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  gen->add_option("--config", config_path, "dataset config JSON")->required();
  gen->add_option("--out", out_path, "output directory")->required();
  gen->add_option("--seed", seed, "seed override");

  auto* train = app.add_subcommand("train", "train a dereverberation model");
  train->add_option("--config", config_path, "training config JSON")->required();
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_path, "output directory")->required();
  train->add_flag("--no-geometry", no_geometry,
                  "train the geometry-ablated variant");
  train->add_option("--mu", mu, "ATM loss weight override");
  train->add_option("--lambda", lambda, "SP loss weight override");
  train->add_option("--seed", seed, "seed override");
  train->add_option("--threads", threads, "worker threads");
  train->add_flag("--deterministic", deterministic,
                  "force single-threaded deterministic mode");
  train->add_option("--resume", resume_path, "checkpoint to resume from");

  auto* dereverb = app.add_subcommand("dereverb", "dereverberate a WAV file");
  dereverb->add_option("--in", in_wav, "input 16 kHz mono WAV")->required();
  dereverb->add_option("--room", room_json, "room descriptor JSON")->required();
  dereverb->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  dereverb->add_option("--out", out_path, "output WAV")->required();

  auto* eval = app.add_subcommand("eval", "evaluate checkpoints on a dataset");
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--checkpoint", ckpt_paths, "model checkpoint(s)");
  eval->add_option("--out", out_path, "output CSV")->required();

  auto* plot = app.add_subcommand("plot-data", "emit plot-ready CSV data");
  plot->add_option("--train-dir", train_dir, "training output directory")
      ->required();
  plot->add_option("--eval", eval_csv, "eval report CSV");
  plot->add_option("--out", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (gen->parsed()) return cmd_gen_data(config_path, out_path, seed);
  if (train->parsed())
    return cmd_train(config_path, data_dir, out_path, no_geometry, mu, lambda,
                     seed, threads, deterministic, resume_path);
  if (dereverb->parsed())
    return cmd_dereverb(in_wav, room_json, ckpt_path, out_path);
  if (eval->parsed()) return cmd_eval(data_dir, ckpt_paths, out_path);
  if (plot->parsed()) return cmd_plot_data(train_dir, eval_csv, out_path);
  return kExitUsage;
}
