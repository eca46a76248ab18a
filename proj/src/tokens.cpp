// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "deverb/tokens.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace deverb {

namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Gram-Schmidt orthonormal columns from a seeded Gaussian draw.
Matrix seeded_orthogonal(long rows, long cols, uint64_t seed) {
  if (cols > rows)
    throw std::invalid_argument("seeded_orthogonal: cols must be <= rows");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix q(rows, cols);
  for (long j = 0; j < cols; ++j) {
    Eigen::VectorXd v(rows);
    for (long i = 0; i < rows; ++i) v(i) = g(rng);
    for (long p = 0; p < j; ++p) v -= q.col(p).dot(v) * q.col(p);
    const double norm = v.norm();
    if (norm < 1e-12)
      throw std::runtime_error("seeded_orthogonal: degenerate draw");
    q.col(j) = v / norm;
  }
  return q;
}

}  // namespace

Matrix mel_filterbank(int bins, int n_mels, int sample_rate_hz, int fft_size) {
  const double fmax = sample_rate_hz / 2.0;
  const double mel_max = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (int m = 0; m < n_mels + 2; ++m)
    edges[m] = mel_to_hz(mel_max * m / (n_mels + 1));

  Matrix fb = Matrix::Zero(bins, n_mels);
  for (int k = 0; k < bins; ++k) {
    const double freq = static_cast<double>(k) * sample_rate_hz / fft_size;
    for (int m = 0; m < n_mels; ++m) {
      const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
      if (freq >= lo && freq <= center && center > lo)
        fb(k, m) = (freq - lo) / (center - lo);
      else if (freq > center && freq <= hi && hi > center)
        fb(k, m) = (hi - freq) / (hi - center);
    }
  }
  return fb;
}

PseudoLabeler::PseudoLabeler(int n_mels, int stack, int latent_dim, int k,
                             uint64_t encoder_seed, const StftConfig& cfg)
    : n_mels_(n_mels),
      stack_(stack),
      latent_dim_(latent_dim),
      k_(k),
      encoder_seed_(encoder_seed),
      cfg_(cfg) {
  if (n_mels < 4 || stack < 1 || latent_dim < 1 || k < 2)
    throw std::invalid_argument("pseudo labeler: bad configuration");
  cfg_.validate();
  mel_ = mel_filterbank(cfg_.bins(), n_mels_, 16000, cfg_.fft_size);
  projection_ =
      seeded_orthogonal(static_cast<long>(stack_) * n_mels_, latent_dim_,
                        encoder_seed_);
}

Tensor PseudoLabeler::encode(const Tensor& wave) const {
  Tensor frames = frames_gather(wave, cfg_);
  Matrix window_row(1, cfg_.win_len);
  for (int i = 0; i < cfg_.win_len; ++i) window_row(0, i) = cfg_.window[i];
  Tensor windowed = mul_rowvec(frames, Tensor::constant(window_row));
  Tensor spec = rfft_frames(windowed, cfg_);  // T x 2F

  const int bins = cfg_.bins();
  Tensor re = cols_slice(spec, 0, bins);
  Tensor im = cols_slice(spec, bins, bins);
  Tensor power = add(mul(re, re), mul(im, im));
  Tensor logmel =
      log_clamped(matmul(power, Tensor::constant(mel_)), kLogFloor);

  const long t_len = logmel.rows();
  const long j_len = t_len - (stack_ - 1);
  if (j_len < 1)
    throw std::invalid_argument("encode: waveform too short for one frame");
  std::vector<Tensor> stacked;
  stacked.reserve(stack_);
  for (int s = 0; s < stack_; ++s)
    stacked.push_back(rows_slice(logmel, s, j_len));
  return matmul(concat_cols(stacked), Tensor::constant(projection_));
}

Matrix PseudoLabeler::encode(const Waveform& wave) const {
  if (wave.sample_rate_hz != 16000)
    throw std::invalid_argument("encode: 16 kHz waveform required");
  Matrix row(1, wave.samples.size());
  for (size_t i = 0; i < wave.samples.size(); ++i) row(0, i) = wave.samples[i];
  return encode(Tensor::constant(std::move(row))).value();
}

Matrix kmeans_fit(const Matrix& points, int k, uint64_t seed, int max_iters) {
  const long n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeans_fit: k >= 1");

  // seeded init from distinct rows
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Matrix centroids(k, points.cols());
  int chosen = 0;
  for (long idx : order) {
    bool duplicate = false;
    for (int c = 0; c < chosen; ++c)
      if ((centroids.row(c) - points.row(idx)).norm() == 0.0) {
        duplicate = true;
        break;
      }
    if (!duplicate) {
      centroids.row(chosen++) = points.row(idx);
      if (chosen == k) break;
    }
  }
  if (chosen < k)
    throw std::invalid_argument("kmeans_fit: fewer than K distinct points");

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (long i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<long> counts(k, 0);
    for (long i = 0; i < n; ++i) {
      sums.row(assign[i]) += points.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      } else {
        // re-seed an empty cluster from the farthest point
        long far = 0;
        double far_d = -1.0;
        for (long i = 0; i < n; ++i) {
          const double d =
              (points.row(i) - centroids.row(assign[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = points.row(far);
      }
    }
  }
  return centroids;
}

void PseudoLabeler::fit(const Matrix& latents, uint64_t seed, int max_iters) {
  centroids_ = kmeans_fit(latents, k_, seed, max_iters);
  fitted_ = true;
}

void PseudoLabeler::set_centroids(Matrix centroids) {
  if (centroids.rows() != k_ || centroids.cols() != latent_dim_)
    throw std::invalid_argument("set_centroids: wrong shape");
  centroids_ = std::move(centroids);
  fitted_ = true;
}

const Matrix& PseudoLabeler::centroids() const {
  if (!fitted_) throw std::logic_error("pseudo labeler: not fitted");
  return centroids_;
}

std::vector<int> PseudoLabeler::assign(const Matrix& latents) const {
  if (!fitted_) throw std::logic_error("pseudo labeler: not fitted");
  std::vector<int> labels(latents.rows());
  for (long i = 0; i < latents.rows(); ++i) {
    int best = 0;
    double best_d = (latents.row(i) - centroids_.row(0)).squaredNorm();
    for (int c = 1; c < k_; ++c) {
      const double d = (latents.row(i) - centroids_.row(c)).squaredNorm();
      if (d < best_d) {  // strict: ties keep the lowest index
        best_d = d;
        best = c;
      }
    }
    labels[i] = best;
  }
  return labels;
}

std::vector<int> PseudoLabeler::pseudo_labels(const Waveform& clean) const {
  return assign(encode(clean));
}

double PseudoLabeler::inertia(const Matrix& latents) const {
  const auto labels = assign(latents);
  double total = 0.0;
  for (long i = 0; i < latents.rows(); ++i)
    total += (latents.row(i) - centroids_.row(labels[i])).squaredNorm();
  return total;
}

}  // namespace deverb
