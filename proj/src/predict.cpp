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

#include "mcg/predict.hpp"

#include <algorithm>
#include <string>

#include "mcg/simulate.hpp"

namespace mcg {

CountTensor replicate_fit(const CountTensor& y, const LatticeGeom& geom,
                          const FitResult& fit, std::uint64_t rng_seed) {
  if (!fit.converged) throw invalid_argument("replicate_fit: fit did not converge");
  if (y.n_colors() != fit.params_hat.n_colors()) {
    throw invalid_argument("replicate_fit: fit and data have different color counts");
  }
  CountTensor out(y.T(), y.n_colors(), y.n_tiles());
  auto seed = y.slice(0);
  std::copy(seed.begin(), seed.end(), out.slice(0).begin());
  Rng rng(rng_seed);
  for (int t = 1; t <= y.T(); ++t) {
    const auto next = simulate_onestep(fit.params_hat, geom, y.slice(t - 1), rng, t);
    std::copy(next.begin(), next.end(), out.slice(t).begin());
  }
  return out;
}

Forecast onestep_forecast(const CountTensor& y, const LatticeGeom& geom, int t_pred,
                          int window, const Mask& mask, std::uint64_t rng_seed,
                          const FitOptions& options) {
  if (window < 1) throw invalid_argument("forecast: window must be >= 1");
  if (t_pred - window < 1) {
    throw invalid_argument("forecast: t_pred - window must be >= 1 (t_pred=" +
                           std::to_string(t_pred) + ", window=" + std::to_string(window) + ")");
  }
  if (t_pred > y.T() + 1) {
    throw invalid_argument("forecast: t_pred=" + std::to_string(t_pred) +
                           " beyond the last observed slice + 1");
  }
  const int per_color = mask.rows() > 0 ? 1 + static_cast<int>(mask.rowwise().count().maxCoeff()) : 1;
  if (static_cast<long long>(window) * y.n_tiles() < per_color) {
    throw invalid_argument("forecast: window of " + std::to_string(window) + " slices gives " +
                           std::to_string(window * y.n_tiles()) +
                           " observations per color, fewer than " + std::to_string(per_color) +
                           " parameters");
  }

  // Responses t_pred - window .. t_pred - 1, each with its preceding slice.
  const CountTensor sub = y.window(t_pred - window - 1, t_pred - 1);
  FitResult fitted = fit(sub, geom, mask, options);

  const auto prev = y.slice(t_pred - 1);
  const auto lambda = onestep_intensity(fitted.params_hat, geom, prev, t_pred);
  Rng rng(rng_seed);
  std::vector<std::int64_t> sampled(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) sampled[j] = rng.poisson(lambda[j]);

  Forecast out{t_pred, window, std::move(fitted), {}, {}};
  out.intensity.resize(y.n_colors(), y.n_tiles());
  for (int c = 0; c < y.n_colors(); ++c) {
    for (int i = 0; i < y.n_tiles(); ++i) {
      out.intensity(c, i) = lambda[static_cast<std::size_t>(c) * y.n_tiles() + i];
    }
  }
  out.sampled = std::move(sampled);
  return out;
}

std::vector<double> default_qq_probs() {
  std::vector<double> probs(99);
  for (int k = 0; k < 99; ++k) probs[k] = (k + 1) / 100.0;
  return probs;
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw invalid_argument("empirical_quantile: empty sample");
  const auto n = static_cast<double>(sorted.size());
  // Smallest k with k / n >= p, guarding against p * n landing a hair above
  // an integer.
  const double target = p * n;
  auto k = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

double empirical_cdf(std::span<const double> sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

QQBand qq_band(std::span<const double> observed, std::span<const double> predicted,
               double offset, std::span<const double> probs) {
  if (observed.empty() || predicted.empty()) throw invalid_argument("qq_band: empty input");
  if (!(offset >= 0.0 && offset <= 1.0)) {
    throw invalid_argument("qq_band: offset must be in [0, 1]");
  }
  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> pred(predicted.begin(), predicted.end());
  std::sort(obs.begin(), obs.end());
  std::sort(pred.begin(), pred.end());

  QQBand band;
  if (probs.empty()) {
    band.probs = default_qq_probs();
  } else {
    band.probs.assign(probs.begin(), probs.end());
    std::sort(band.probs.begin(), band.probs.end());
  }
  band.covered = true;
  for (double p : band.probs) {
    if (!(p > 0.0 && p <= 1.0)) throw invalid_argument("qq_band: probabilities must be in (0, 1]");
    const double yq = empirical_quantile(obs, p);
    const double f0 = empirical_cdf(obs, yq);
    const double lo = empirical_quantile(pred, std::clamp(f0 - offset, 0.0, 1.0));
    const double hi = empirical_quantile(pred, std::clamp(f0 + offset, 0.0, 1.0));
    band.observed_q.push_back(yq);
    band.predicted_q.push_back(empirical_quantile(pred, f0));
    band.lo.push_back(lo);
    band.hi.push_back(hi);
    if (yq < lo || yq > hi) band.covered = false;
  }
  return band;
}

QQBand qq_band(std::span<const std::int64_t> observed, std::span<const std::int64_t> predicted,
               double offset, std::span<const double> probs) {
  std::vector<double> a(observed.begin(), observed.end());
  std::vector<double> b(predicted.begin(), predicted.end());
  return qq_band(std::span<const double>(a), std::span<const double>(b), offset, probs);
}

}  // namespace mcg
