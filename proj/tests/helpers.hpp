// Copyright 2026 The mcg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mcg/model.hpp"
#include "mcg/simulate.hpp"

namespace testing {

// Rook-plus-self neighbor mean of log1p on an n x n grid, written out longhand
// so it shares nothing with the library's adjacency code.
inline double brute_s(const mcg::CountTensor& y, int t, int color, int n, int row, int col) {
  const int dr[] = {0, -1, 1, 0, 0};
  const int dc[] = {0, 0, 0, -1, 1};
  double sum = 0.0;
  int count = 0;
  for (int k = 0; k < 5; ++k) {
    const int r = row + dr[k], c = col + dc[k];
    if (r < 0 || r >= n || c < 0 || c >= n) continue;
    sum += std::log(1.0 + static_cast<double>(y.at(t, color, r * n + c)));
    ++count;
  }
  return sum / count;
}

// Sum over (t, c, i) of y v - exp(v) with v from an explicit (alpha, beta).
inline double brute_loglik(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& beta,
                           const mcg::CountTensor& y, int n) {
  const int k = y.n_colors();
  double total = 0.0;
  for (int t = 1; t <= y.T(); ++t) {
    for (int c = 0; c < k; ++c) {
      for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
          double v = alpha[c];
          for (int d = 0; d < k; ++d) v += beta(c, d) * brute_s(y, t - 1, d, n, row, col);
          total += static_cast<double>(y.at(t, c, row * n + col)) * v - std::exp(v);
        }
      }
    }
  }
  return total;
}

// Free coordinates in color-major order: alpha[c], then the free beta(c, .).
inline void unpack(const Eigen::VectorXd& theta, const mcg::Mask& mask, Eigen::VectorXd& alpha,
                   Eigen::MatrixXd& beta) {
  const int k = static_cast<int>(mask.rows());
  alpha.resize(k);
  beta = Eigen::MatrixXd::Zero(k, k);
  int j = 0;
  for (int c = 0; c < k; ++c) {
    alpha[c] = theta[j++];
    for (int d = 0; d < k; ++d) {
      if (mask(c, d)) beta(c, d) = theta[j++];
    }
  }
}

inline double brute_loglik(const Eigen::VectorXd& theta, const mcg::Mask& mask,
                           const mcg::CountTensor& y, int n) {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd beta;
  unpack(theta, mask, alpha, beta);
  return brute_loglik(alpha, beta, y, n);
}

// Tensor of iid Poisson(mean) counts for quick property checks.
inline mcg::CountTensor random_counts(int T, int k, int n_tiles, double mean, std::uint64_t seed) {
  mcg::Rng rng(seed);
  mcg::CountTensor y(T, k, n_tiles);
  for (int t = 0; t <= T; ++t) {
    for (int c = 0; c < k; ++c) {
      for (int i = 0; i < n_tiles; ++i) y.at(t, c, i) = rng.poisson(mean);
    }
  }
  return y;
}

// n = 4, T = 3, two colors; drawn once from a log-linear model and frozen.
// Reference fits below come from an independent Poisson GLM solver.
inline mcg::CountTensor fixture_counts() {
  static const std::int64_t raw[] = {
      1, 2, 2, 4, 4, 1, 3, 2, 2, 3, 3, 3, 2, 2, 3, 2, 3, 2, 1, 2, 2, 5, 2, 1, 2, 0,
      3, 4, 4, 2, 3, 3, 1, 1, 1, 0, 1, 3, 1, 0, 3, 4, 3, 2, 0, 2, 0, 1, 2, 3, 2, 3,
      2, 1, 1, 1, 3, 3, 5, 1, 2, 3, 3, 3, 3, 0, 2, 1, 1, 1, 2, 1, 2, 1, 3, 0, 2, 1,
      1, 4, 1, 1, 1, 2, 6, 5, 1, 2, 5, 1, 2, 1, 7, 4, 1, 3, 1, 1, 1, 0, 0, 4, 1, 0,
      0, 2, 3, 3, 2, 2, 5, 3, 1, 1, 1, 1, 3, 2, 5, 2, 2, 3, 2, 2, 2, 2, 3, 2};
  mcg::CountTensor y(3, 2, 16);
  std::size_t j = 0;
  for (int t = 0; t <= 3; ++t) {
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 16; ++i) y.at(t, c, i) = raw[j++];
    }
  }
  return y;
}

}  // namespace testing
