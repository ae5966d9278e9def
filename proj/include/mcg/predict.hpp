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
#include <vector>

#include <Eigen/Dense>

#include "mcg/inference.hpp"
#include "mcg/lattice.hpp"
#include "mcg/model.hpp"

namespace mcg {

/// Replicate of `y` where every slice t >= 1 is drawn conditionally on the
/// observed slice t - 1. The t = 0 slice is copied.
CountTensor replicate_fit(const CountTensor& y, const LatticeGeom& geom,
                          const FitResult& fit, std::uint64_t rng_seed);

struct Forecast {
  int t_pred = 0;
  int window = 0;
  FitResult fit;
  Eigen::MatrixXd intensity;           // color x tile
  std::vector<std::int64_t> sampled;   // [color][tile]
};

inline constexpr int kDefaultWindow = 5;

/// Fits on responses t_pred - window .. t_pred - 1 and predicts t_pred from the
/// observed slice t_pred - 1. t_pred may be T + 1 (pure forecast).
Forecast onestep_forecast(const CountTensor& y, const LatticeGeom& geom,
                          int t_pred, int window, const Mask& mask,
                          std::uint64_t rng_seed,
                          const FitOptions& options = {});

struct QQBand {
  std::vector<double> probs;
  std::vector<double> observed_q;
  std::vector<double> predicted_q;
  std::vector<double> lo;
  std::vector<double> hi;
  bool covered = false;
};

/// Percentile grid 0.01, 0.02, ..., 0.99.
std::vector<double> default_qq_probs();

/// Type-1 empirical quantile: smallest sample value x with F(x) >= p.
/// `sorted` must be ascending and nonempty.
double empirical_quantile(std::span<const double> sorted, double p);
/// Fraction of `sorted` that is <= x.
double empirical_cdf(std::span<const double> sorted, double x);

/// Nonparametric QQ band. At each grid probability p the observed quantile
/// y = F0^-1(p) is mapped to F1^-1(F0(y)), with band
/// F1^-1(clamp(F0(y) -/+ offset, 0, 1)). F0 and F1 are the empirical CDFs of
/// the observations and predictions.
QQBand qq_band(std::span<const double> observed, std::span<const double> predicted,
               double offset, std::span<const double> probs = {});
QQBand qq_band(std::span<const std::int64_t> observed,
               std::span<const std::int64_t> predicted, double offset,
               std::span<const double> probs = {});

}  // namespace mcg
