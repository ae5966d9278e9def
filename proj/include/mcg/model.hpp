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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcg/lattice.hpp"

namespace mcg {

/// Which interaction coefficients are free. Entry (c, c') refers to the
/// effect of color c' on color c.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

Mask full_mask(int n_colors);

/// Intercepts and the interaction matrix. Masked-out interactions are held at
/// exactly zero. Free coordinates are ordered color by color: alpha(c)
/// followed by the free entries of row c of beta in column order, so that the
/// information matrix is block diagonal in this ordering.
class Params {
 public:
  Params(Eigen::VectorXd alpha, Eigen::MatrixXd beta, Mask mask);
  Params(Eigen::VectorXd alpha, Eigen::MatrixXd beta);

  int n_colors() const noexcept { return static_cast<int>(alpha_.size()); }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::MatrixXd& beta() const noexcept { return beta_; }
  const Mask& mask() const noexcept { return mask_; }

  /// Number of free coordinates, n_colors + count(mask).
  int n_free() const;
  /// Free coordinates of color c: 1 + count(mask row c).
  int n_free(int color) const;
  /// Offset of color c's block in the free vector.
  int block_offset(int color) const;

  Eigen::VectorXd free_vector() const;
  Params with_free(const Eigen::Ref<const Eigen::VectorXd>& theta) const;

  /// Design columns used by color c: 0 (intercept) then 1 + c' for each free c'.
  std::vector<int> active_columns(int color) const;

  std::vector<std::string> free_names() const;

 private:
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd beta_;
  Mask mask_;
};

/// Counts indexed (t, color, tile) for t = 0..T; t = 0 is the seed state.
class CountTensor {
 public:
  CountTensor() = default;
  CountTensor(int T, int n_colors, int n_tiles);

  int T() const noexcept { return T_; }
  int n_colors() const noexcept { return n_colors_; }
  int n_tiles() const noexcept { return n_tiles_; }

  std::int64_t& at(int t, int color, int tile) { return data_[index(t, color, tile)]; }
  std::int64_t at(int t, int color, int tile) const { return data_[index(t, color, tile)]; }

  /// All colors at time t, laid out [color][tile].
  std::span<std::int64_t> slice(int t);
  std::span<const std::int64_t> slice(int t) const;
  std::span<const std::int64_t> slice(int t, int color) const;

  const std::vector<std::int64_t>& raw() const noexcept { return data_; }

  /// Sub-tensor of slices first..last (inclusive), renumbered from 0.
  CountTensor window(int first, int last) const;

  friend bool operator==(const CountTensor&, const CountTensor&) = default;

 private:
  std::size_t index(int t, int color, int tile) const noexcept {
    return (static_cast<std::size_t>(t) * n_colors_ + color) * n_tiles_ + tile;
  }

  int T_ = 0;
  int n_colors_ = 0;
  int n_tiles_ = 0;
  std::vector<std::int64_t> data_;
};

/// Neighbourhood statistics S(t, c', i) for t = 1..T, computed from counts at
/// time t - 1.
class SufficientStats {
 public:
  SufficientStats(int T, int n_colors, int n_tiles);

  int T() const noexcept { return T_; }
  int n_colors() const noexcept { return n_colors_; }
  int n_tiles() const noexcept { return n_tiles_; }

  double& at(int t, int color, int tile) { return data_[index(t, color, tile)]; }
  double at(int t, int color, int tile) const { return data_[index(t, color, tile)]; }

 private:
  std::size_t index(int t, int color, int tile) const noexcept {
    return (static_cast<std::size_t>(t - 1) * n_colors_ + color) * n_tiles_ + tile;
  }

  int T_;
  int n_colors_;
  int n_tiles_;
  std::vector<double> data_;
};

SufficientStats precompute_stats(const CountTensor& y, const LatticeGeom& geom);

/// v = alpha(c) + sum_c' beta(c, c') S(t, c', i).
double log_intensity(const Params& params, const SufficientStats& stats, int t,
                     int color, int tile);

/// Regression layout shared by every color: row (t - 1) * n_tiles + i holds
/// (1, S(t, 0, i), ..., S(t, C-1, i)) in `x` and the responses Y(t, c, i) in
/// column c of `y`. Responses are real so that tests can plug in synthetic,
/// non-integer values.
struct Design {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  int n_tiles = 0;
  int T = 0;

  int n_colors() const noexcept { return static_cast<int>(y.cols()); }
  int n_obs() const noexcept { return static_cast<int>(x.rows()); }
};

Design make_design(const CountTensor& y, const SufficientStats& stats);
Design make_design(const CountTensor& y, const LatticeGeom& geom);

}  // namespace mcg
