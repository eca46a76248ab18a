// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/nn_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "deverb/fft.hpp"

namespace deverb {

namespace {

std::shared_ptr<TensorNode> make_node(
    Matrix value, std::vector<std::shared_ptr<TensorNode>> parents,
    std::function<void(TensorNode&)> backprop, const char* op) {
  auto node = std::make_shared<TensorNode>();
  node->value = std::move(value);
  node->parents = std::move(parents);
  for (const auto& p : node->parents)
    if (p->requires_grad) node->requires_grad = true;
  if (node->requires_grad) node->backprop = std::move(backprop);
  node->op = op;
  return node;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  auto pa = a.node(), pb = b.node();
  return Tensor::from_node(make_node(
      a.value() + b.value(), {pa, pb},
      [pa, pb](TensorNode& n) {
        if (pa->requires_grad) {
          pa->ensure_grad();
          pa->grad += n.grad;
        }
        if (pb->requires_grad) {
          pb->ensure_grad();
          pb->grad += n.grad;
        }
      },
      "add"));
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  auto pa = a.node(), pb = b.node();
  return Tensor::from_node(make_node(
      a.value() - b.value(), {pa, pb},
      [pa, pb](TensorNode& n) {
        if (pa->requires_grad) {
          pa->ensure_grad();
          pa->grad += n.grad;
        }
        if (pb->requires_grad) {
          pb->ensure_grad();
          pb->grad -= n.grad;
        }
      },
      "sub"));
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  auto pa = a.node(), pb = b.node();
  return Tensor::from_node(make_node(
      a.value().cwiseProduct(b.value()), {pa, pb},
      [pa, pb](TensorNode& n) {
        if (pa->requires_grad) {
          pa->ensure_grad();
          pa->grad += n.grad.cwiseProduct(pb->value);
        }
        if (pb->requires_grad) {
          pb->ensure_grad();
          pb->grad += n.grad.cwiseProduct(pa->value);
        }
      },
      "mul"));
}

Tensor scale(const Tensor& a, double c) {
  auto pa = a.node();
  return Tensor::from_node(make_node(
      a.value() * c, {pa},
      [pa, c](TensorNode& n) {
        pa->ensure_grad();
        pa->grad += c * n.grad;
      },
      "scale"));
}

Tensor relu(const Tensor& x) {
  auto px = x.node();
  return Tensor::from_node(make_node(
      x.value().cwiseMax(0.0), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() +=
            n.grad.array() * (px->value.array() > 0.0).cast<double>();
      },
      "relu"));
}

Tensor tanh_t(const Tensor& x) {
  auto px = x.node();
  Matrix y = x.value().array().tanh();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() += n.grad.array() * (1.0 - n.value.array().square());
      },
      "tanh"));
}

Tensor sigmoid(const Tensor& x) {
  auto px = x.node();
  Matrix y = (1.0 / (1.0 + (-x.value().array()).exp())).matrix();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() +=
            n.grad.array() * n.value.array() * (1.0 - n.value.array());
      },
      "sigmoid"));
}

Tensor log_clamped(const Tensor& x, double floor) {
  if (!(floor > 0.0))
    throw std::invalid_argument("log_clamped: floor must be positive");
  auto px = x.node();
  Matrix y = x.value().cwiseMax(floor).array().log();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px, floor](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() += n.grad.array() *
                            (px->value.array() > floor).cast<double>() /
                            px->value.array().max(floor);
      },
      "log_clamped"));
}

Tensor sqrt_t(const Tensor& x, double eps) {
  auto px = x.node();
  Matrix y = (x.value().array() + eps).sqrt();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() += n.grad.array() / (2.0 * n.value.array().max(1e-150));
      },
      "sqrt"));
}

Tensor scaled_tanh(const Tensor& x, double k) {
  auto px = x.node();
  Matrix y = k * (x.value().array() / k).tanh();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px, k](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() +=
            n.grad.array() * (1.0 - (n.value.array() / k).square());
      },
      "scaled_tanh"));
}

Tensor scaled_atanh(const Tensor& x, double k) {
  auto px = x.node();
  const double lim = 1.0 - 1e-12;
  Eigen::ArrayXXd z = (x.value().array() / k).max(-lim).min(lim);
  Matrix y = (k * z.atanh()).matrix();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px, k, lim](TensorNode& n) {
        px->ensure_grad();
        Eigen::ArrayXXd z = (px->value.array() / k).max(-lim).min(lim);
        px->grad.array() += n.grad.array() / (1.0 - z.square());
      },
      "scaled_atanh"));
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree");
  auto pa = a.node(), pb = b.node();
  return Tensor::from_node(make_node(
      a.value() * b.value(), {pa, pb},
      [pa, pb](TensorNode& n) {
        if (pa->requires_grad) {
          pa->ensure_grad();
          pa->grad.noalias() += n.grad * pb->value.transpose();
        }
        if (pb->requires_grad) {
          pb->ensure_grad();
          pb->grad.noalias() += pa->value.transpose() * n.grad;
        }
      },
      "matmul"));
}

Tensor transpose(const Tensor& a) {
  auto pa = a.node();
  return Tensor::from_node(make_node(
      a.value().transpose(), {pa},
      [pa](TensorNode& n) {
        pa->ensure_grad();
        pa->grad += n.grad.transpose();
      },
      "transpose"));
}

Tensor add_rowvec(const Tensor& x, const Tensor& v) {
  if (v.rows() != 1 || v.cols() != x.cols())
    throw std::invalid_argument("add_rowvec: v must be 1 x cols(x)");
  auto px = x.node(), pv = v.node();
  Matrix y = x.value().rowwise() + v.value().row(0);
  return Tensor::from_node(make_node(
      std::move(y), {px, pv},
      [px, pv](TensorNode& n) {
        if (px->requires_grad) {
          px->ensure_grad();
          px->grad += n.grad;
        }
        if (pv->requires_grad) {
          pv->ensure_grad();
          pv->grad.row(0) += n.grad.colwise().sum();
        }
      },
      "add_rowvec"));
}

Tensor mul_rowvec(const Tensor& x, const Tensor& v) {
  if (v.rows() != 1 || v.cols() != x.cols())
    throw std::invalid_argument("mul_rowvec: v must be 1 x cols(x)");
  auto px = x.node(), pv = v.node();
  Matrix y = x.value().array().rowwise() * v.value().row(0).array();
  return Tensor::from_node(make_node(
      std::move(y), {px, pv},
      [px, pv](TensorNode& n) {
        if (px->requires_grad) {
          px->ensure_grad();
          px->grad.array() += n.grad.array().rowwise() * pv->value.row(0).array();
        }
        if (pv->requires_grad) {
          pv->ensure_grad();
          pv->grad.row(0) +=
              n.grad.cwiseProduct(px->value).colwise().sum();
        }
      },
      "mul_rowvec"));
}

Tensor sum_all(const Tensor& x) {
  auto px = x.node();
  Matrix y(1, 1);
  y(0, 0) = x.value().sum();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() += n.grad(0, 0);
      },
      "sum_all"));
}

Tensor mean_all(const Tensor& x) {
  auto px = x.node();
  const double inv = 1.0 / static_cast<double>(x.rows() * x.cols());
  Matrix y(1, 1);
  y(0, 0) = x.value().sum() * inv;
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px, inv](TensorNode& n) {
        px->ensure_grad();
        px->grad.array() += n.grad(0, 0) * inv;
      },
      "mean_all"));
}

Tensor rows_slice(const Tensor& x, long r0, long n) {
  if (r0 < 0 || n < 0 || r0 + n > x.rows())
    throw std::invalid_argument("rows_slice: out of range");
  auto px = x.node();
  return Tensor::from_node(make_node(
      x.value().middleRows(r0, n), {px},
      [px, r0, n](TensorNode& node) {
        px->ensure_grad();
        px->grad.middleRows(r0, n) += node.grad;
      },
      "rows_slice"));
}

Tensor cols_slice(const Tensor& x, long c0, long n) {
  if (c0 < 0 || n < 0 || c0 + n > x.cols())
    throw std::invalid_argument("cols_slice: out of range");
  auto px = x.node();
  return Tensor::from_node(make_node(
      x.value().middleCols(c0, n), {px},
      [px, c0, n](TensorNode& node) {
        px->ensure_grad();
        px->grad.middleCols(c0, n) += node.grad;
      },
      "cols_slice"));
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
  long rows = 0;
  const long cols = parts[0].cols();
  std::vector<std::shared_ptr<TensorNode>> parents;
  for (const auto& p : parts) {
    if (p.cols() != cols)
      throw std::invalid_argument("concat_rows: column mismatch");
    rows += p.rows();
    parents.push_back(p.node());
  }
  Matrix y(rows, cols);
  long off = 0;
  for (const auto& p : parts) {
    y.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return Tensor::from_node(make_node(
      std::move(y), parents,
      [parents](TensorNode& n) {
        long off = 0;
        for (const auto& p : parents) {
          if (p->requires_grad) {
            p->ensure_grad();
            p->grad += n.grad.middleRows(off, p->value.rows());
          }
          off += p->value.rows();
        }
      },
      "concat_rows"));
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
  long cols = 0;
  const long rows = parts[0].rows();
  std::vector<std::shared_ptr<TensorNode>> parents;
  for (const auto& p : parts) {
    if (p.rows() != rows)
      throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
    parents.push_back(p.node());
  }
  Matrix y(rows, cols);
  long off = 0;
  for (const auto& p : parts) {
    y.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return Tensor::from_node(make_node(
      std::move(y), parents,
      [parents](TensorNode& n) {
        long off = 0;
        for (const auto& p : parents) {
          if (p->requires_grad) {
            p->ensure_grad();
            p->grad += n.grad.middleCols(off, p->value.cols());
          }
          off += p->value.cols();
        }
      },
      "concat_cols"));
}

Tensor pad_rows(const Tensor& x, long total_rows) {
  if (total_rows < x.rows())
    throw std::invalid_argument("pad_rows: total smaller than input");
  auto px = x.node();
  Matrix y = Matrix::Zero(total_rows, x.cols());
  y.topRows(x.rows()) = x.value();
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        px->grad += n.grad.topRows(px->value.rows());
      },
      "pad_rows"));
}

Tensor roll_rows(const Tensor& x, long shift) {
  const long z = x.rows();
  if (z == 0) throw std::invalid_argument("roll_rows: empty");
  const long s = ((shift % z) + z) % z;
  auto px = x.node();
  Matrix y(z, x.cols());
  for (long i = 0; i < z; ++i) y.row((i + s) % z) = x.value().row(i);
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px, s, z](TensorNode& n) {
        px->ensure_grad();
        for (long i = 0; i < z; ++i)
          px->grad.row(i) += n.grad.row((i + s) % z);
      },
      "roll_rows"));
}

Tensor softmax_rows(const Tensor& x, const Matrix* additive_mask) {
  if (additive_mask && (additive_mask->rows() != x.rows() ||
                        additive_mask->cols() != x.cols()))
    throw std::invalid_argument("softmax_rows: mask shape mismatch");
  auto px = x.node();
  Matrix logits = x.value();
  if (additive_mask) logits += *additive_mask;
  Matrix y(logits.rows(), logits.cols());
  for (long i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
    y.row(i) = (e / e.sum()).matrix();
  }
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px](TensorNode& n) {
        px->ensure_grad();
        for (long i = 0; i < n.value.rows(); ++i) {
          const double dot = n.grad.row(i).dot(n.value.row(i));
          px->grad.row(i).array() +=
              n.value.row(i).array() * (n.grad.row(i).array() - dot);
        }
      },
      "softmax_rows"));
}

Tensor layernorm_rows(const Tensor& x, double eps) {
  auto px = x.node();
  const long rows = x.rows(), cols = x.cols();
  Matrix y(rows, cols);
  Eigen::VectorXd inv_std(rows);
  for (long i = 0; i < rows; ++i) {
    const double mean = x.value().row(i).mean();
    const double var =
        (x.value().row(i).array() - mean).square().sum() / cols;
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std(i) = is;
    y.row(i) = ((x.value().row(i).array() - mean) * is).matrix();
  }
  return Tensor::from_node(make_node(
      std::move(y), {px},
      [px, inv_std](TensorNode& n) {
        px->ensure_grad();
        const long cols = n.value.cols();
        for (long i = 0; i < n.value.rows(); ++i) {
          const double gmean = n.grad.row(i).mean();
          const double gymean =
              n.grad.row(i).cwiseProduct(n.value.row(i)).sum() / cols;
          px->grad.row(i).array() +=
              inv_std(i) * (n.grad.row(i).array() - gmean -
                            n.value.row(i).array() * gymean);
        }
      },
      "layernorm_rows"));
}

Tensor conv1d_depthwise(const Tensor& x, const Tensor& w) {
  if (w.cols() != x.cols())
    throw std::invalid_argument("conv1d_depthwise: channel mismatch");
  if (w.rows() % 2 == 0)
    throw std::invalid_argument("conv1d_depthwise: kernel length must be odd");
  auto px = x.node(), pw = w.node();
  const long t_len = x.rows(), d = x.cols(), k = w.rows();
  const long pad = (k - 1) / 2;
  Matrix y = Matrix::Zero(t_len, d);
  for (long t = 0; t < t_len; ++t)
    for (long kk = 0; kk < k; ++kk) {
      const long src = t + kk - pad;
      if (src < 0 || src >= t_len) continue;
      y.row(t).array() += x.value().row(src).array() * w.value().row(kk).array();
    }
  return Tensor::from_node(make_node(
      std::move(y), {px, pw},
      [px, pw, t_len, k, pad](TensorNode& n) {
        if (px->requires_grad) {
          px->ensure_grad();
          for (long t = 0; t < t_len; ++t)
            for (long kk = 0; kk < k; ++kk) {
              const long src = t + kk - pad;
              if (src < 0 || src >= t_len) continue;
              px->grad.row(src).array() +=
                  n.grad.row(t).array() * pw->value.row(kk).array();
            }
        }
        if (pw->requires_grad) {
          pw->ensure_grad();
          for (long t = 0; t < t_len; ++t)
            for (long kk = 0; kk < k; ++kk) {
              const long src = t + kk - pad;
              if (src < 0 || src >= t_len) continue;
              pw->grad.row(kk).array() +=
                  n.grad.row(t).array() * px->value.row(src).array();
            }
        }
      },
      "conv1d_depthwise"));
}

Tensor gather_matrix(const Tensor& table, const Eigen::MatrixXi& idx) {
  if (table.rows() != 1)
    throw std::invalid_argument("gather_matrix: table must be a row vector");
  const long len = table.cols();
  Matrix y(idx.rows(), idx.cols());
  for (long i = 0; i < idx.rows(); ++i)
    for (long j = 0; j < idx.cols(); ++j) {
      const int k = idx(i, j);
      if (k < 0 || k >= len)
        throw std::invalid_argument("gather_matrix: index out of range");
      y(i, j) = table.value()(0, k);
    }
  auto pt = table.node();
  Eigen::MatrixXi idx_copy = idx;
  return Tensor::from_node(make_node(
      std::move(y), {pt},
      [pt, idx_copy](TensorNode& n) {
        pt->ensure_grad();
        for (long i = 0; i < idx_copy.rows(); ++i)
          for (long j = 0; j < idx_copy.cols(); ++j)
            pt->grad(0, idx_copy(i, j)) += n.grad(i, j);
      },
      "gather_matrix"));
}

Tensor cross_entropy_rows(const Tensor& logits,
                          const std::vector<int>& labels) {
  if (static_cast<long>(labels.size()) != logits.rows())
    throw std::invalid_argument("cross_entropy_rows: label count mismatch");
  auto pl = logits.node();
  const long rows = logits.rows(), cols = logits.cols();
  Matrix probs(rows, cols);
  double loss = 0.0;
  for (long i = 0; i < rows; ++i) {
    const int label = labels[i];
    if (label < 0 || label >= cols)
      throw std::invalid_argument("cross_entropy_rows: label out of range");
    const double m = logits.value().row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.value().row(i).array() - m).exp();
    const double denom = e.sum();
    probs.row(i) = (e / denom).matrix();
    loss -= std::log(std::max(probs(i, label), 1e-300));
  }
  loss /= static_cast<double>(rows);
  Matrix y(1, 1);
  y(0, 0) = loss;
  std::vector<int> labels_copy = labels;
  return Tensor::from_node(make_node(
      std::move(y), {pl},
      [pl, probs, labels_copy, rows](TensorNode& n) {
        pl->ensure_grad();
        const double g = n.grad(0, 0) / static_cast<double>(rows);
        pl->grad += g * probs;
        for (long i = 0; i < rows; ++i)
          pl->grad(i, labels_copy[i]) -= g;
      },
      "cross_entropy_rows"));
}

Tensor frames_gather(const Tensor& wave, const StftConfig& cfg) {
  cfg.validate();
  if (wave.rows() != 1)
    throw std::invalid_argument("frames_gather: wave must be 1 x L");
  const long len = wave.cols();
  const long frames = stft_frame_count(len, cfg);
  if (frames <= 0)
    throw std::invalid_argument("frames_gather: wave shorter than one window");
  auto pw = wave.node();
  Matrix y = Matrix::Zero(frames, cfg.win_len);
  for (long t = 0; t < frames; ++t)
    for (int n = 0; n < cfg.win_len; ++n) {
      const long idx = t * cfg.hop + n;
      if (idx < len) y(t, n) = wave.value()(0, idx);
    }
  const long hop = cfg.hop, win = cfg.win_len;
  return Tensor::from_node(make_node(
      std::move(y), {pw},
      [pw, hop, win, len](TensorNode& n) {
        pw->ensure_grad();
        for (long t = 0; t < n.value.rows(); ++t)
          for (long k = 0; k < win; ++k) {
            const long idx = t * hop + k;
            if (idx < len) pw->grad(0, idx) += n.grad(t, k);
          }
      },
      "frames_gather"));
}

Tensor rfft_frames(const Tensor& frames, const StftConfig& cfg) {
  cfg.validate();
  if (frames.cols() != cfg.win_len)
    throw std::invalid_argument("rfft_frames: frame width != win_len");
  auto pf = frames.node();
  const long t_len = frames.rows();
  const int nfft = cfg.fft_size;
  const int bins = cfg.bins();
  Matrix y(t_len, 2 * bins);
  std::vector<double> buf(cfg.win_len);
  for (long t = 0; t < t_len; ++t) {
    for (int n = 0; n < cfg.win_len; ++n) buf[n] = frames.value()(t, n);
    auto spec = rfft(buf, nfft);
    for (int k = 0; k < bins; ++k) {
      y(t, k) = spec[k].real();
      y(t, bins + k) = spec[k].imag();
    }
  }
  const int win = cfg.win_len;
  return Tensor::from_node(make_node(
      std::move(y), {pf},
      [pf, nfft, bins, win](TensorNode& n) {
        pf->ensure_grad();
        // adjoint of the one-sided DFT: grad_x[m] = sum_k (dRe_k cos(w k m)
        // - dIm_k sin(w k m)) = Re(conj-transform of the cotangent)
        std::vector<std::complex<double>> c(nfft);
        for (long t = 0; t < n.value.rows(); ++t) {
          for (int k = 0; k < nfft; ++k) c[k] = {0.0, 0.0};
          for (int k = 0; k < bins; ++k)
            c[k] = {n.grad(t, k), n.grad(t, bins + k)};
          // unnormalized inverse kernel e^{+j w k m}: conjugate trick
          for (auto& v : c) v = std::conj(v);
          fft_inplace(c, false);
          for (int m = 0; m < win; ++m)
            pf->grad(t, m) += std::conj(c[m]).real();
        }
      },
      "rfft_frames"));
}

Tensor istft_wave(const Tensor& re, const Tensor& im, const StftConfig& cfg,
                  long out_len) {
  cfg.validate();
  check_same_shape(re, im, "istft_wave");
  if (re.cols() != cfg.bins())
    throw std::invalid_argument("istft_wave: bins mismatch");
  const long frames = re.rows();
  const long capacity = (frames - 1) * cfg.hop + cfg.win_len;
  if (out_len > capacity || out_len <= 0)
    throw std::invalid_argument("istft_wave: bad out_len");

  // squared-window overlap-add normalizer, shared by forward and adjoint
  std::vector<double> norm(capacity, 0.0);
  for (long t = 0; t < frames; ++t)
    for (int n = 0; n < cfg.win_len; ++n)
      norm[t * cfg.hop + n] += cfg.window[n] * cfg.window[n];

  const int nfft = cfg.fft_size;
  const int bins = cfg.bins();
  Matrix y = Matrix::Zero(1, out_len);
  {
    std::vector<std::complex<double>> spec(bins);
    for (long t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k)
        spec[k] = {re.value()(t, k), im.value()(t, k)};
      auto frame = irfft(spec, nfft);
      const long start = t * cfg.hop;
      for (int n = 0; n < cfg.win_len; ++n) {
        const long idx = start + n;
        if (idx < out_len && norm[idx] > 0.0)
          y(0, idx) += cfg.window[n] * frame[n] / norm[idx];
      }
    }
  }

  auto pre = re.node(), pim = im.node();
  const StftConfig cfg_copy = cfg;
  return Tensor::from_node(make_node(
      std::move(y), {pre, pim},
      [pre, pim, cfg_copy, norm, frames, out_len, nfft, bins](TensorNode& n) {
        pre->ensure_grad();
        pim->ensure_grad();
        const auto& w = cfg_copy.window;
        // cotangent of each synthesis frame, then adjoint of irfft
        std::vector<std::complex<double>> c(nfft);
        for (long t = 0; t < frames; ++t) {
          const long start = t * cfg_copy.hop;
          std::vector<double> q(nfft, 0.0);
          for (int m = 0; m < cfg_copy.win_len; ++m) {
            const long idx = start + m;
            if (idx < out_len && norm[idx] > 0.0)
              q[m] = n.grad(0, idx) * w[m] / norm[idx];
          }
          // adjoint of x = irfft(X): dXr_k = s_k/N * sum_m q_m cos(w k m),
          // dXi_k = -s_k/N * sum_m q_m sin(w k m), s_k = 2 except DC/Nyquist
          for (int k = 0; k < nfft; ++k) c[k] = {q[k], 0.0};
          fft_inplace(c, false);  // FFT(q)_k = sum q cos - j sum q sin
          for (int k = 0; k < bins; ++k) {
            const double s =
                (k == 0 || k == nfft / 2) ? 1.0 : 2.0;
            pre->grad(t, k) += s / nfft * c[k].real();
            pim->grad(t, k) += s / nfft * c[k].imag();
          }
        }
      },
      "istft_wave"));
}

}  // namespace deverb
