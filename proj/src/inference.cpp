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

#include "mcg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "mcg/simulate.hpp"

namespace mcg {

namespace {

constexpr int kMaxStalledSteps = 5;
constexpr double kRoundingSlack = 64.0 * std::numeric_limits<double>::epsilon();

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Eigen::MatrixXd select_columns(const Design& design, std::span<const int> columns) {
  Eigen::MatrixXd xa(design.x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) xa.col(j) = design.x.col(columns[j]);
  return xa;
}

std::string column_name(int color, int column) {
  if (column == 0) return "intercept of color " + std::to_string(color);
  return "S[" + std::to_string(column - 1) + "] (beta[" + std::to_string(color) + "," +
         std::to_string(column - 1) + "])";
}

// Incremental Cholesky of the column-scaled Gram matrix; a column whose
// residual after projection on the earlier ones vanishes is reported.
void check_rank(const Eigen::MatrixXd& xa, std::span<const int> columns, int color) {
  const Eigen::Index k = xa.cols();
  Eigen::MatrixXd gram = xa.transpose() * xa;
  Eigen::VectorXd scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(gram(j, j) > 0.0)) {
      throw Error(ErrorCode::rank_deficient,
                  "rank-deficient design: column " + column_name(color, columns[j]) +
                      " is identically zero");
    }
    scale[j] = 1.0 / std::sqrt(gram(j, j));
  }
  gram = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double d = gram(j, j) - l.row(j).head(j).squaredNorm();
    if (d < 1e-10) {
      std::string msg = "rank-deficient design: column " + column_name(color, columns[j]) +
                        " is collinear with";
      for (Eigen::Index m = 0; m < j; ++m) msg += (m ? ", " : " ") + column_name(color, columns[m]);
      throw Error(ErrorCode::rank_deficient, msg);
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index m = j + 1; m < k; ++m) {
      l(m, j) = (gram(m, j) - l.row(m).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
}

double poisson_loglik(const Eigen::VectorXd& eta, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return y.dot(eta) - eta.array().exp().sum();
}

// Size of the terms that cancel in the log-likelihood sum; its rounding error
// scales with this, not with the (much smaller) total.
double loglik_magnitude(const Eigen::VectorXd& eta, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return y.dot(eta.cwiseAbs()) + eta.array().exp().sum();
}

}  // namespace

double loglik(const Params& params, const Design& design) {
  if (params.n_colors() != design.n_colors()) {
    throw invalid_argument("loglik: params and data have different color counts");
  }
  double total = 0.0;
  for (int c = 0; c < params.n_colors(); ++c) {
    Eigen::VectorXd coef(1 + params.n_colors());
    coef << params.alpha()[c], params.beta().row(c).transpose();
    const Eigen::VectorXd eta = design.x * coef;
    total += poisson_loglik(eta, design.y.col(c));
  }
  return total;
}

double loglik(const Params& params, const CountTensor& y, const SufficientStats& stats) {
  return loglik(params, make_design(y, stats));
}

Eigen::VectorXd score(const Params& params, const Design& design) {
  if (params.n_colors() != design.n_colors()) {
    throw invalid_argument("score: params and data have different color counts");
  }
  Eigen::VectorXd u(params.n_free());
  for (int c = 0; c < params.n_colors(); ++c) {
    Eigen::VectorXd coef(1 + params.n_colors());
    coef << params.alpha()[c], params.beta().row(c).transpose();
    const Eigen::VectorXd resid = design.y.col(c) - (design.x * coef).array().exp().matrix();
    const Eigen::VectorXd full = design.x.transpose() * resid;
    const auto cols = params.active_columns(c);
    const int offset = params.block_offset(c);
    for (std::size_t j = 0; j < cols.size(); ++j) u[offset + j] = full[cols[j]];
  }
  return u / static_cast<double>(design.n_tiles);
}

Eigen::VectorXd score(const Params& params, const CountTensor& y,
                      const SufficientStats& stats) {
  return score(params, make_design(y, stats));
}

ColorFit fit_color(const Design& design, int color, std::span<const int> columns,
                   const FitOptions& options) {
  if (color < 0 || color >= design.n_colors()) throw invalid_argument("fit: bad color");
  if (columns.empty() || columns.front() != 0) {
    throw invalid_argument("fit: the intercept column must come first");
  }
  if (design.n_obs() < static_cast<int>(columns.size())) {
    throw invalid_argument("fit: " + std::to_string(design.n_obs()) +
                           " observations for " + std::to_string(columns.size()) +
                           " parameters");
  }
  const Eigen::MatrixXd xa = select_columns(design, columns);
  const auto y = design.y.col(color);
  check_rank(xa, columns, color);

  const double n_tiles = static_cast<double>(design.n_tiles);
  ColorFit out;
  out.columns.assign(columns.begin(), columns.end());
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(xa.cols());
  coef[0] = std::log1p(std::max(0.0, y.mean()));
  Eigen::VectorXd eta = xa * coef;
  double ll = poisson_loglik(eta, y);
  int stalled = 0;

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd mu = eta.array().exp().matrix();
    const Eigen::VectorXd grad = xa.transpose() * (y - mu);
    const double grad_norm = grad.lpNorm<Eigen::Infinity>() / n_tiles;
    if (grad_norm <= options.grad_tol) {
      out.coef = coef;
      out.loglik = ll;
      out.iterations = iter;
      out.grad_norm = grad_norm;
      return out;
    }
    if (iter >= options.max_iter) {
      throw NonConvergenceError("fit: no convergence for color " + std::to_string(color) +
                                    " after " + std::to_string(iter) +
                                    " iterations (score sup-norm " +
                                    fmt_g(grad_norm) + ")",
                                coef, color, iter, grad_norm);
    }

    const Eigen::MatrixXd info = xa.transpose() * mu.asDiagonal() * xa;
    const Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::rank_deficient,
                  "fit: information matrix of color " + std::to_string(color) +
                      " is not positive definite");
    }
    const Eigen::VectorXd step = llt.solve(grad);

    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial_coef, trial_eta;
    double trial_ll = -std::numeric_limits<double>::infinity();
    for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      trial_coef = coef + scale * step;
      trial_eta = xa * trial_coef;
      if (trial_eta.maxCoeff() <= kMaxLogIntensity) {
        trial_ll = poisson_loglik(trial_eta, y);
        // Allow rounding noise in the comparison near the optimum.
        if (trial_ll >= ll - kRoundingSlack * loglik_magnitude(eta, y)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      throw NonConvergenceError("fit: step halving failed for color " +
                                    std::to_string(color) + " (score sup-norm " +
                                    fmt_g(grad_norm) + ")",
                                coef, color, iter, grad_norm);
    }
    const double change =
        std::fabs(trial_ll - ll) / std::max(loglik_magnitude(trial_eta, y), 1e-300);
    coef = std::move(trial_coef);
    eta = std::move(trial_eta);
    ll = trial_ll;

    // A flat objective alone is not convergence: Newton steps near the optimum
    // can move the log-likelihood below rounding while the score is still
    // above tolerance. Give up only after repeated flat steps.
    stalled = change <= options.rel_tol ? stalled + 1 : 0;
    if (stalled >= kMaxStalledSteps) {
      const Eigen::VectorXd g = xa.transpose() * (y - eta.array().exp().matrix());
      const double gn = g.lpNorm<Eigen::Infinity>() / n_tiles;
      throw NonConvergenceError("fit: log-likelihood stalled for color " +
                                    std::to_string(color) + " with score sup-norm " +
                                    fmt_g(gn),
                                coef, color, iter + 1, gn);
    }
  }
}

FitResult fit(const Design& design, const Mask& mask, const FitOptions& options) {
  const int k = design.n_colors();
  if (mask.rows() != k || mask.cols() != k) {
    throw invalid_argument("fit: mask must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (design.n_obs() < 1) throw invalid_argument("fit: no observations");

  const Params shape(Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Zero(k, k), mask);
  Eigen::VectorXd theta(shape.n_free());
  double ll = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  for (int c = 0; c < k; ++c) {
    const auto cols = shape.active_columns(c);
    const int offset = shape.block_offset(c);
    try {
      const ColorFit cf = fit_color(design, c, cols, options);
      theta.segment(offset, cols.size()) = cf.coef;
      ll += cf.loglik;
      grad_norm = std::max(grad_norm, cf.grad_norm);
      iterations = std::max(iterations, cf.iterations);
    } catch (const NonConvergenceError& e) {
      theta.segment(offset, cols.size()) = e.partial();
      for (int d = c + 1; d < k; ++d) {
        theta.segment(shape.block_offset(d), shape.n_free(d)).setZero();
      }
      throw NonConvergenceError(e.what(), theta, c, e.iterations(), e.grad_norm());
    }
  }

  FitResult result{shape.with_free(theta), 0.0, {}, {}};
  result.loglik = ll;
  result.iterations = iterations;
  result.converged = true;
  result.grad_norm = grad_norm;
  result.n_tiles = design.n_tiles;
  result.T = design.T;
  result.cov = sandwich_cov(result.params_hat, design);
  result.se = result.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  const double p = static_cast<double>(result.n_free());
  result.aic = -2.0 * ll + 2.0 * p;
  result.bic = -2.0 * ll + p * std::log(static_cast<double>(design.n_tiles) * design.T);
  return result;
}

FitResult fit(const CountTensor& y, const LatticeGeom& geom, const Mask& mask,
              const FitOptions& options) {
  if (y.T() < 1) throw invalid_argument("fit: need at least one transition (T >= 1)");
  return fit(make_design(y, geom), mask, options);
}

Eigen::MatrixXd information(const Params& params, const Design& design) {
  if (params.n_colors() != design.n_colors()) {
    throw invalid_argument("information: params and data have different color counts");
  }
  const int p = params.n_free();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
  for (int c = 0; c < params.n_colors(); ++c) {
    const auto cols = params.active_columns(c);
    const Eigen::MatrixXd xa = select_columns(design, cols);
    Eigen::VectorXd coef(cols.size());
    coef[0] = params.alpha()[c];
    for (std::size_t j = 1; j < cols.size(); ++j) coef[j] = params.beta()(c, cols[j] - 1);
    const Eigen::VectorXd mu = (xa * coef).array().exp().matrix();
    const int offset = params.block_offset(c);
    h.block(offset, offset, cols.size(), cols.size()) = xa.transpose() * mu.asDiagonal() * xa;
  }
  return h;
}

Eigen::MatrixXd sandwich_cov(const Params& params_hat, const Design& design) {
  const Eigen::MatrixXd h = information(params_hat, design);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  for (int c = 0; c < params_hat.n_colors(); ++c) {
    const int offset = params_hat.block_offset(c);
    const int m = params_hat.n_free(c);
    const Eigen::MatrixXd block = h.block(offset, offset, m, m);
    const Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::singular_information,
                  "singular information block for color " + std::to_string(c));
    }
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    if (!inv.allFinite()) {
      throw Error(ErrorCode::singular_information,
                  "singular information block for color " + std::to_string(c));
    }
    v.block(offset, offset, m, m) = 0.5 * (inv + inv.transpose());
  }
  return v;
}

Eigen::MatrixXd sandwich_cov(const Params& params_hat, const CountTensor& y,
                             const SufficientStats& stats) {
  return sandwich_cov(params_hat, make_design(y, stats));
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<std::pair<double, double>> confidence_intervals(const Eigen::VectorXd& estimate,
                                                            const Eigen::VectorXd& se,
                                                            double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw invalid_argument("confidence level must be in (0, 1), got " + std::to_string(level));
  }
  if (estimate.size() != se.size()) throw invalid_argument("confidence_intervals: size mismatch");
  const double z = normal_quantile(0.5 + 0.5 * level);
  std::vector<std::pair<double, double>> out(estimate.size());
  for (Eigen::Index j = 0; j < estimate.size(); ++j) {
    out[j] = {estimate[j] - z * se[j], estimate[j] + z * se[j]};
  }
  return out;
}

std::vector<std::pair<double, double>> confidence_intervals(const FitResult& fit,
                                                            double level) {
  if (!fit.converged) throw invalid_argument("confidence_intervals: fit did not converge");
  return confidence_intervals(fit.params_hat.free_vector(), fit.se, level);
}

}  // namespace mcg
