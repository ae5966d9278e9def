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

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mcg/error.hpp"
#include "mcg/model.hpp"

namespace mcg {

struct FitOptions {
  double grad_tol = 1e-8;   // sup-norm of the tile-normalised score
  double rel_tol = 1e-12;   // relative log-likelihood change
  int max_iter = 100;
  int max_halvings = 30;
};

struct FitResult {
  Params params_hat;
  double loglik = 0.0;
  Eigen::VectorXd se;
  Eigen::MatrixXd cov;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int n_tiles = 0;
  int T = 0;

  int n_free() const { return params_hat.n_free(); }
};

/// Thrown when Fisher scoring runs out of iterations or stalls away from a
/// stationary point. `partial` is the last accepted iterate over the free
/// coordinates of whatever was being fitted (one color block for fit_color,
/// the full vector for fit).
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, Eigen::VectorXd partial, int color,
                      int iterations, double grad_norm)
      : Error(ErrorCode::non_convergence, what),
        partial_(std::move(partial)),
        color_(color),
        iterations_(iterations),
        grad_norm_(grad_norm) {}

  const Eigen::VectorXd& partial() const noexcept { return partial_; }
  int color() const noexcept { return color_; }
  int iterations() const noexcept { return iterations_; }
  double grad_norm() const noexcept { return grad_norm_; }

 private:
  Eigen::VectorXd partial_;
  int color_;
  int iterations_;
  double grad_norm_;
};

/// sum over (t, c, i) of Y v - exp(v); the log(Y!) term is dropped.
double loglik(const Params& params, const Design& design);
double loglik(const Params& params, const CountTensor& y,
              const SufficientStats& stats);

/// Gradient of loglik / n_tiles over the free coordinates.
Eigen::VectorXd score(const Params& params, const Design& design);
Eigen::VectorXd score(const Params& params, const CountTensor& y,
                      const SufficientStats& stats);

/// Single-color Poisson log-linear fit on a subset of design columns.
struct ColorFit {
  std::vector<int> columns;
  Eigen::VectorXd coef;
  double loglik = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
};

ColorFit fit_color(const Design& design, int color, std::span<const int> columns,
                   const FitOptions& options = {});

FitResult fit(const Design& design, const Mask& mask,
              const FitOptions& options = {});
FitResult fit(const CountTensor& y, const LatticeGeom& geom, const Mask& mask,
              const FitOptions& options = {});

/// Empirical information sum exp(v) g g^T over free coordinates, block
/// diagonal by color.
Eigen::MatrixXd information(const Params& params, const Design& design);

/// Inverse of the empirical information.
Eigen::MatrixXd sandwich_cov(const Params& params_hat, const Design& design);
Eigen::MatrixXd sandwich_cov(const Params& params_hat, const CountTensor& y,
                             const SufficientStats& stats);

/// Standard normal quantile.
double normal_quantile(double p);

/// theta_j +/- z_{(1+level)/2} se_j over the free coordinates.
std::vector<std::pair<double, double>> confidence_intervals(
    const FitResult& fit, double level);
std::vector<std::pair<double, double>> confidence_intervals(
    const Eigen::VectorXd& estimate, const Eigen::VectorXd& se, double level);

}  // namespace mcg
