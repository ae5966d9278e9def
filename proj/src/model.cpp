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

#include "mcg/model.hpp"

#include <cmath>
#include <string>

#include "mcg/error.hpp"

namespace mcg {

Mask full_mask(int n_colors) { return Mask::Constant(n_colors, n_colors, true); }

Params::Params(Eigen::VectorXd alpha, Eigen::MatrixXd beta, Mask mask)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), mask_(std::move(mask)) {
  const auto k = alpha_.size();
  if (k < 1) throw invalid_argument("params: need at least one color");
  if (beta_.rows() != k || beta_.cols() != k) {
    throw invalid_argument("params: beta must be " + std::to_string(k) + "x" +
                           std::to_string(k));
  }
  if (mask_.rows() != k || mask_.cols() != k) {
    throw invalid_argument("params: mask must be " + std::to_string(k) + "x" +
                           std::to_string(k));
  }
  if (!alpha_.allFinite() || !beta_.allFinite()) {
    throw invalid_argument("params: non-finite coefficient");
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index d = 0; d < k; ++d) {
      if (!mask_(c, d) && beta_(c, d) != 0.0) {
        throw invalid_argument("params: masked-out beta[" + std::to_string(c) +
                               "," + std::to_string(d) + "] must be 0");
      }
    }
  }
}

Params::Params(Eigen::VectorXd alpha, Eigen::MatrixXd beta)
    : Params(alpha, std::move(beta), full_mask(static_cast<int>(alpha.size()))) {}

int Params::n_free() const { return n_colors() + static_cast<int>(mask_.count()); }

int Params::n_free(int color) const {
  return 1 + static_cast<int>(mask_.row(color).count());
}

int Params::block_offset(int color) const {
  int offset = 0;
  for (int c = 0; c < color; ++c) offset += n_free(c);
  return offset;
}

Eigen::VectorXd Params::free_vector() const {
  Eigen::VectorXd theta(n_free());
  int k = 0;
  for (int c = 0; c < n_colors(); ++c) {
    theta[k++] = alpha_[c];
    for (int d = 0; d < n_colors(); ++d) {
      if (mask_(c, d)) theta[k++] = beta_(c, d);
    }
  }
  return theta;
}

Params Params::with_free(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  if (theta.size() != n_free()) {
    throw invalid_argument("params: expected " + std::to_string(n_free()) +
                           " free coordinates, got " + std::to_string(theta.size()));
  }
  Eigen::VectorXd alpha(n_colors());
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n_colors(), n_colors());
  int k = 0;
  for (int c = 0; c < n_colors(); ++c) {
    alpha[c] = theta[k++];
    for (int d = 0; d < n_colors(); ++d) {
      if (mask_(c, d)) beta(c, d) = theta[k++];
    }
  }
  return Params(std::move(alpha), std::move(beta), mask_);
}

std::vector<int> Params::active_columns(int color) const {
  std::vector<int> cols{0};
  for (int d = 0; d < n_colors(); ++d) {
    if (mask_(color, d)) cols.push_back(1 + d);
  }
  return cols;
}

std::vector<std::string> Params::free_names() const {
  std::vector<std::string> names;
  for (int c = 0; c < n_colors(); ++c) {
    names.push_back("alpha[" + std::to_string(c) + "]");
    for (int d = 0; d < n_colors(); ++d) {
      if (mask_(c, d)) {
        names.push_back("beta[" + std::to_string(c) + "," + std::to_string(d) + "]");
      }
    }
  }
  return names;
}

CountTensor::CountTensor(int T, int n_colors, int n_tiles)
    : T_(T), n_colors_(n_colors), n_tiles_(n_tiles) {
  if (T < 0 || n_colors < 1 || n_tiles < 1) {
    throw invalid_argument("count tensor: bad dimensions T=" + std::to_string(T) +
                           " colors=" + std::to_string(n_colors) +
                           " tiles=" + std::to_string(n_tiles));
  }
  data_.assign(static_cast<std::size_t>(T + 1) * n_colors * n_tiles, 0);
}

std::span<std::int64_t> CountTensor::slice(int t) {
  return {data_.data() + index(t, 0, 0), static_cast<std::size_t>(n_colors_) * n_tiles_};
}

std::span<const std::int64_t> CountTensor::slice(int t) const {
  return {data_.data() + index(t, 0, 0), static_cast<std::size_t>(n_colors_) * n_tiles_};
}

std::span<const std::int64_t> CountTensor::slice(int t, int color) const {
  return {data_.data() + index(t, color, 0), static_cast<std::size_t>(n_tiles_)};
}

CountTensor CountTensor::window(int first, int last) const {
  if (first < 0 || last > T_ || first > last) {
    throw invalid_argument("count tensor: window [" + std::to_string(first) + ", " +
                           std::to_string(last) + "] outside 0.." + std::to_string(T_));
  }
  CountTensor out(last - first, n_colors_, n_tiles_);
  for (int t = first; t <= last; ++t) {
    auto src = slice(t);
    std::copy(src.begin(), src.end(), out.slice(t - first).begin());
  }
  return out;
}

SufficientStats::SufficientStats(int T, int n_colors, int n_tiles)
    : T_(T), n_colors_(n_colors), n_tiles_(n_tiles) {
  data_.assign(static_cast<std::size_t>(T) * n_colors * n_tiles, 0.0);
}

SufficientStats precompute_stats(const CountTensor& y, const LatticeGeom& geom) {
  if (y.n_tiles() != geom.n_tiles()) {
    throw invalid_argument("stats: tensor has " + std::to_string(y.n_tiles()) +
                           " tiles, lattice has " + std::to_string(geom.n_tiles()));
  }
  SufficientStats stats(y.T(), y.n_colors(), y.n_tiles());
  std::vector<double> logs(y.n_tiles());
  for (int t = 1; t <= y.T(); ++t) {
    for (int c = 0; c < y.n_colors(); ++c) {
      const auto prev = y.slice(t - 1, c);
      for (int j = 0; j < y.n_tiles(); ++j) {
        logs[j] = std::log1p(static_cast<double>(prev[j]));
      }
      for (int i = 0; i < y.n_tiles(); ++i) {
        const auto nb = geom.neighbors(i);
        double sum = 0.0;
        for (int j : nb) sum += logs[j];
        stats.at(t, c, i) = sum / static_cast<double>(nb.size());
      }
    }
  }
  return stats;
}

double log_intensity(const Params& params, const SufficientStats& stats, int t,
                     int color, int tile) {
  if (t < 1 || t > stats.T() || color < 0 || color >= params.n_colors() ||
      tile < 0 || tile >= stats.n_tiles()) {
    throw invalid_argument("log_intensity: index out of range");
  }
  double v = params.alpha()[color];
  for (int d = 0; d < params.n_colors(); ++d) {
    v += params.beta()(color, d) * stats.at(t, d, tile);
  }
  return v;
}

Design make_design(const CountTensor& y, const SufficientStats& stats) {
  if (y.T() != stats.T() || y.n_colors() != stats.n_colors() ||
      y.n_tiles() != stats.n_tiles()) {
    throw invalid_argument("design: counts and stats dimensions differ");
  }
  const int n_tiles = y.n_tiles();
  const int k = y.n_colors();
  Design d;
  d.n_tiles = n_tiles;
  d.T = y.T();
  d.x.resize(static_cast<Eigen::Index>(y.T()) * n_tiles, 1 + k);
  d.y.resize(d.x.rows(), k);
  for (int t = 1; t <= y.T(); ++t) {
    for (int i = 0; i < n_tiles; ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(t - 1) * n_tiles + i;
      d.x(row, 0) = 1.0;
      for (int c = 0; c < k; ++c) {
        d.x(row, 1 + c) = stats.at(t, c, i);
        d.y(row, c) = static_cast<double>(y.at(t, c, i));
      }
    }
  }
  return d;
}

Design make_design(const CountTensor& y, const LatticeGeom& geom) {
  return make_design(y, precompute_stats(y, geom));
}

}  // namespace mcg
