// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace deverb {

namespace {

constexpr char kMagic[8] = {'D', 'V', 'E', 'R', 'B', 'C', 'K', '1'};

json config_to_json(const ModelConfig& c) {
  return json{{"d_model", c.d_model},
              {"n_window", c.n_window},
              {"loops", c.loops},
              {"heads", c.heads},
              {"conv_kernel", c.conv_kernel},
              {"dec_conv_kernel", c.dec_conv_kernel},
              {"visual_len", c.visual_len},
              {"visual_dims", c.visual_dims},
              {"bins", c.bins},
              {"frames", c.frames},
              {"use_geometry", c.use_geometry},
              {"mask_bound", c.mask_bound},
              {"atm_latent_dim", c.atm_latent_dim},
              {"atm_classes", c.atm_classes}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.d_model = j.at("d_model").get<int>();
  c.n_window = j.at("n_window").get<int>();
  c.loops = j.at("loops").get<int>();
  c.heads = j.at("heads").get<int>();
  c.conv_kernel = j.at("conv_kernel").get<int>();
  c.dec_conv_kernel = j.at("dec_conv_kernel").get<int>();
  c.visual_len = j.at("visual_len").get<int>();
  c.visual_dims = j.at("visual_dims").get<int>();
  c.bins = j.at("bins").get<int>();
  c.frames = j.at("frames").get<int>();
  c.use_geometry = j.at("use_geometry").get<bool>();
  c.mask_bound = j.at("mask_bound").get<double>();
  c.atm_latent_dim = j.at("atm_latent_dim").get<int>();
  c.atm_classes = j.at("atm_classes").get<int>();
  return c;
}

void append_blob(std::vector<double>& blob, const Matrix& m) {
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) blob.push_back(m(i, j));
}

Matrix read_blob(const std::vector<double>& blob, size_t offset, long rows,
                 long cols) {
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = blob[offset + i * cols + j];
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json manifest;
  manifest["config"] = config_to_json(ckpt.params.config);
  manifest["epoch"] = ckpt.epoch;
  manifest["variant"] = ckpt.variant;
  manifest["seed"] = ckpt.seed;
  manifest["labeler_seed"] = ckpt.labeler_seed;

  std::vector<double> blob;
  json entries = json::array();
  for (const auto& [name, tensor] : ckpt.params.entries()) {
    entries.push_back(json{{"name", name},
                           {"rows", tensor.rows()},
                           {"cols", tensor.cols()},
                           {"offset", blob.size()}});
    append_blob(blob, tensor.value());
  }
  manifest["entries"] = entries;

  if (ckpt.adam) {
    manifest["adam"] = json{{"lr", ckpt.adam->lr},
                            {"beta1", ckpt.adam->beta1},
                            {"beta2", ckpt.adam->beta2},
                            {"eps", ckpt.adam->eps},
                            {"step", ckpt.adam->step},
                            {"m_offset", blob.size()}};
    for (const Matrix& m : ckpt.adam->m) append_blob(blob, m);
    manifest["adam"]["v_offset"] = blob.size();
    for (const Matrix& v : ckpt.adam->v) append_blob(blob, v);
  }

  manifest["labeler_rows"] = ckpt.labeler_centroids.rows();
  manifest["labeler_cols"] = ckpt.labeler_centroids.cols();
  manifest["labeler_offset"] = blob.size();
  append_blob(blob, ckpt.labeler_centroids);

  const std::string text = manifest.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  const uint64_t json_len = text.size();
  out.write(reinterpret_cast<const char*>(&json_len), sizeof(json_len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(double)));
  if (!out) throw std::runtime_error("checkpoint: write failed " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != std::string(kMagic, 8))
    throw std::runtime_error("checkpoint: bad magic in " + path);
  uint64_t json_len = 0;
  in.read(reinterpret_cast<char*>(&json_len), sizeof(json_len));
  std::string text(json_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(json_len));
  if (!in) throw std::runtime_error("checkpoint: truncated manifest");
  json manifest = json::parse(text);

  std::vector<double> blob;
  {
    std::vector<char> rest((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    if (rest.size() % sizeof(double) != 0)
      throw std::runtime_error("checkpoint: blob size not a double multiple");
    blob.resize(rest.size() / sizeof(double));
    std::memcpy(blob.data(), rest.data(), rest.size());
  }

  Checkpoint ckpt;
  ckpt.params.config = config_from_json(manifest.at("config"));
  ckpt.epoch = manifest.value("epoch", 0);
  ckpt.variant = manifest.value("variant", "");
  ckpt.seed = manifest.value("seed", 0ULL);
  ckpt.labeler_seed = manifest.value("labeler_seed", 0ULL);

  for (const auto& e : manifest.at("entries")) {
    const std::string name = e.at("name").get<std::string>();
    const long rows = e.at("rows").get<long>();
    const long cols = e.at("cols").get<long>();
    const size_t offset = e.at("offset").get<size_t>();
    if (offset + rows * cols > blob.size())
      throw std::runtime_error("checkpoint: entry out of blob range: " + name);
    ckpt.params.add(name, read_blob(blob, offset, rows, cols));
  }

  if (manifest.contains("adam")) {
    AdamState adam;
    const auto& a = manifest["adam"];
    adam.lr = a.at("lr").get<double>();
    adam.beta1 = a.at("beta1").get<double>();
    adam.beta2 = a.at("beta2").get<double>();
    adam.eps = a.at("eps").get<double>();
    adam.step = a.at("step").get<long>();
    size_t mo = a.at("m_offset").get<size_t>();
    size_t vo = a.at("v_offset").get<size_t>();
    for (const auto& [name, tensor] : ckpt.params.entries()) {
      adam.m.push_back(read_blob(blob, mo, tensor.rows(), tensor.cols()));
      mo += tensor.rows() * tensor.cols();
      adam.v.push_back(read_blob(blob, vo, tensor.rows(), tensor.cols()));
      vo += tensor.rows() * tensor.cols();
    }
    ckpt.adam = std::move(adam);
  }

  const long lr_rows = manifest.value("labeler_rows", 0L);
  const long lr_cols = manifest.value("labeler_cols", 0L);
  if (lr_rows > 0 && lr_cols > 0)
    ckpt.labeler_centroids = read_blob(
        blob, manifest.at("labeler_offset").get<size_t>(), lr_rows, lr_cols);
  return ckpt;
}

}  // namespace deverb
