// Copyright 2026 The deverb authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "deverb/nn_ops.hpp"
#include "deverb/stft.hpp"
#include "deverb/tensor.hpp"

using namespace deverb;

namespace {

Matrix random_matrix(long rows, long cols, uint64_t seed, double scale = 1.0,
                     double offset = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = g(rng) + offset;
  return m;
}

// Central finite differences on every coordinate of every input.
void check_gradient(
    const std::function<Tensor(const std::vector<Tensor>&)>& f,
    std::vector<Matrix> inputs, double tol = 1e-4, double h = 1e-5) {
  std::vector<Tensor> leaves;
  leaves.reserve(inputs.size());
  for (auto& m : inputs) leaves.push_back(Tensor::leaf(m, true));

  Tensor loss = f(leaves);
  REQUIRE(loss.rows() == 1);
  REQUIRE(loss.cols() == 1);
  backward(loss);

  for (size_t p = 0; p < inputs.size(); ++p) {
    const Matrix analytic = leaves[p].grad();
    for (long i = 0; i < inputs[p].rows(); ++i) {
      for (long j = 0; j < inputs[p].cols(); ++j) {
        auto eval = [&](double delta) {
          std::vector<Tensor> probe;
          for (size_t q = 0; q < inputs.size(); ++q) {
            Matrix m = inputs[q];
            if (q == p) m(i, j) += delta;
            probe.push_back(Tensor::constant(std::move(m)));
          }
          return f(probe).value()(0, 0);
        };
        const double fd = (eval(h) - eval(-h)) / (2.0 * h);
        const double a = analytic(i, j);
        const double err =
            std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6});
        if (err >= tol) {
          CAPTURE(p);
          CAPTURE(i);
          CAPTURE(j);
          CAPTURE(a);
          CAPTURE(fd);
        }
        CHECK(err < tol);
      }
    }
  }
}

Matrix weight_for(long rows, long cols, uint64_t seed) {
  return random_matrix(rows, cols, seed ^ 0xabcdef, 1.0);
}

// weighted sum to make the scalar sensitive to every output element
Tensor weighted(const Tensor& out, uint64_t seed) {
  return sum_all(mul(out, Tensor::constant(
                              weight_for(out.rows(), out.cols(), seed))));
}

}  // namespace

TEST_CASE("basic derivative sanity: d(x^2)/dx at 3 is 6, constants get 0") {
  Tensor x = Tensor::leaf(Matrix::Constant(1, 1, 3.0), true);
  Tensor unused = Tensor::leaf(Matrix::Constant(1, 1, 5.0), true);
  Tensor loss = sum_all(mul(x, x));
  backward(loss);
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
  CHECK(unused.grad()(0, 0) == 0.0);
}

TEST_CASE("elementwise op gradients match finite differences") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(add(in[0], in[1]), seed);
        },
        {random_matrix(3, 4, seed), random_matrix(3, 4, seed + 50)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(sub(in[0], in[1]), seed);
        },
        {random_matrix(3, 4, seed), random_matrix(3, 4, seed + 60)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(mul(in[0], in[1]), seed);
        },
        {random_matrix(3, 4, seed), random_matrix(3, 4, seed + 70)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(scale(in[0], -1.37), seed);
        },
        {random_matrix(3, 4, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(tanh_t(in[0]), seed);
        },
        {random_matrix(3, 4, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(sigmoid(in[0]), seed);
        },
        {random_matrix(3, 4, seed)});
    // keep relu inputs away from the kink
    Matrix shifted = random_matrix(3, 4, seed);
    for (long i = 0; i < shifted.size(); ++i)
      shifted(i) += shifted(i) >= 0.0 ? 0.2 : -0.2;
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(relu(in[0]), seed);
        },
        {shifted});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(log_clamped(in[0], 1e-6), seed);
        },
        {random_matrix(3, 4, seed, 1.0, 4.0)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(sqrt_t(in[0], 1e-9), seed);
        },
        {random_matrix(3, 4, seed, 1.0, 5.0)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(scaled_tanh(in[0], 10.0), seed);
        },
        {random_matrix(3, 4, seed, 4.0)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(scaled_atanh(in[0], 10.0), seed);
        },
        {random_matrix(3, 4, seed, 2.0)});
  }
}

TEST_CASE("linear algebra and broadcast gradients") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(matmul(in[0], in[1]), seed);
        },
        {random_matrix(3, 4, seed), random_matrix(4, 2, seed + 10)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(transpose(in[0]), seed);
        },
        {random_matrix(3, 5, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(add_rowvec(in[0], in[1]), seed);
        },
        {random_matrix(4, 3, seed), random_matrix(1, 3, seed + 20)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(mul_rowvec(in[0], in[1]), seed);
        },
        {random_matrix(4, 3, seed), random_matrix(1, 3, seed + 30)});
  }
}

TEST_CASE("reduction, shape, and permutation gradients") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    check_gradient(
        [&](const std::vector<Tensor>& in) { return sum_all(in[0]); },
        {random_matrix(3, 4, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) { return mean_all(in[0]); },
        {random_matrix(3, 4, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(rows_slice(in[0], 1, 3), seed);
        },
        {random_matrix(6, 3, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(cols_slice(in[0], 2, 2), seed);
        },
        {random_matrix(3, 6, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(concat_rows({in[0], in[1]}), seed);
        },
        {random_matrix(2, 3, seed), random_matrix(4, 3, seed + 5)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(concat_cols({in[0], in[1]}), seed);
        },
        {random_matrix(3, 2, seed), random_matrix(3, 4, seed + 6)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(pad_rows(in[0], 7), seed);
        },
        {random_matrix(4, 3, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(roll_rows(in[0], 3), seed);
        },
        {random_matrix(8, 3, seed)});
  }
}

TEST_CASE("softmax, layernorm, conv, gather, cross-entropy gradients") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(softmax_rows(in[0]), seed);
        },
        {random_matrix(4, 6, seed)});
    Matrix mask = Matrix::Zero(4, 6);
    mask.col(5).setConstant(-1e30);
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(softmax_rows(in[0], &mask), seed);
        },
        {random_matrix(4, 6, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(layernorm_rows(in[0]), seed);
        },
        {random_matrix(4, 6, seed)},
        2e-4);
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(conv1d_depthwise(in[0], in[1]), seed);
        },
        {random_matrix(9, 3, seed), random_matrix(5, 3, seed + 40)});

    Eigen::MatrixXi idx(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) idx(i, j) = std::abs(i - j);
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(gather_matrix(in[0], idx), seed);
        },
        {random_matrix(1, 4, seed)});

    std::vector<int> labels = {0, 2, 1, 2};
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return cross_entropy_rows(in[0], labels);
        },
        {random_matrix(4, 3, seed)});
  }
}

TEST_CASE("structured signal op gradients (frames, rfft, istft)") {
  StftConfig cfg;
  cfg.win_len = 12;
  cfg.hop = 4;
  cfg.fft_size = 16;
  cfg.window = cola_window(cfg.win_len, cfg.hop);

  for (uint64_t seed = 1; seed <= 5; ++seed) {
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(frames_gather(in[0], cfg), seed);
        },
        {random_matrix(1, 40, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(rfft_frames(in[0], cfg), seed);
        },
        {random_matrix(5, 12, seed)});
    check_gradient(
        [&](const std::vector<Tensor>& in) {
          return weighted(istft_wave(in[0], in[1], cfg, 36), seed);
        },
        {random_matrix(7, 9, seed), random_matrix(7, 9, seed + 3)});
  }
}

TEST_CASE("gradients accumulate across shared subexpressions") {
  Tensor x = Tensor::leaf(Matrix::Constant(1, 1, 2.0), true);
  Tensor y = add(mul(x, x), x);  // x^2 + x
  backward(sum_all(y));
  CHECK(x.grad()(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("backward demands a scalar") {
  Tensor x = Tensor::leaf(random_matrix(2, 2, 1), true);
  CHECK_THROWS_AS(backward(x), std::invalid_argument);
}
