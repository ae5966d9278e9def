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

#include "mcg/simulate.hpp"

#include <cmath>
#include <string>

#include "mcg/error.hpp"

namespace mcg {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t base, std::uint64_t index) {
  return Rng(splitmix64(base) + index);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw invalid_argument("poisson: bad intensity " + std::to_string(lambda));
  }
  if (lambda == 0.0) return 0;
  if (lambda < 10.0) {
    // Sequential inversion.
    double p = std::exp(-lambda);
    double cdf = p;
    const double u = uniform();
    std::int64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // Transformed rejection with squeeze (Hormann, PTRS).
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

namespace {

void check_slice(const Params& params, const LatticeGeom& geom,
                 std::span<const std::int64_t> prev) {
  const auto expected = static_cast<std::size_t>(params.n_colors()) * geom.n_tiles();
  if (prev.size() != expected) {
    throw invalid_argument("simulate: slice has " + std::to_string(prev.size()) +
                           " entries, expected " + std::to_string(expected));
  }
  for (auto v : prev) {
    if (v < 0) throw invalid_argument("simulate: negative count in slice");
  }
}

}  // namespace

std::vector<double> onestep_intensity(const Params& params, const LatticeGeom& geom,
                                      std::span<const std::int64_t> prev, int t) {
  check_slice(params, geom, prev);
  const int k = params.n_colors();
  const int n_tiles = geom.n_tiles();

  std::vector<double> logs(prev.size());
  for (std::size_t j = 0; j < prev.size(); ++j) {
    logs[j] = std::log1p(static_cast<double>(prev[j]));
  }
  std::vector<double> s(prev.size());
  for (int d = 0; d < k; ++d) {
    for (int i = 0; i < n_tiles; ++i) {
      const auto nb = geom.neighbors(i);
      double sum = 0.0;
      for (int j : nb) sum += logs[static_cast<std::size_t>(d) * n_tiles + j];
      s[static_cast<std::size_t>(d) * n_tiles + i] = sum / static_cast<double>(nb.size());
    }
  }

  std::vector<double> lambda(prev.size());
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < n_tiles; ++i) {
      double v = params.alpha()[c];
      for (int d = 0; d < k; ++d) {
        v += params.beta()(c, d) * s[static_cast<std::size_t>(d) * n_tiles + i];
      }
      const double rate = std::exp(v);
      if (v > kMaxLogIntensity || rate > kMaxIntensity) {
        throw Error(ErrorCode::explosive_process,
                    "explosive process: log-intensity " + std::to_string(v) +
                        " at t=" + std::to_string(t) + " color=" + std::to_string(c) +
                        " tile=" + std::to_string(i));
      }
      lambda[static_cast<std::size_t>(c) * n_tiles + i] = rate;
    }
  }
  return lambda;
}

std::vector<std::int64_t> simulate_onestep(const Params& params, const LatticeGeom& geom,
                                           std::span<const std::int64_t> prev,
                                           Rng& rng, int t) {
  const auto lambda = onestep_intensity(params, geom, prev, t);
  std::vector<std::int64_t> next(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) next[j] = rng.poisson(lambda[j]);
  return next;
}

CountTensor simulate_from(const Params& params, const LatticeGeom& geom,
                          std::span<const std::int64_t> seed_slice, int T, Rng& rng) {
  if (T < 1) throw invalid_argument("simulate: T must be >= 1");
  check_slice(params, geom, seed_slice);
  CountTensor y(T, params.n_colors(), geom.n_tiles());
  std::copy(seed_slice.begin(), seed_slice.end(), y.slice(0).begin());
  for (int t = 1; t <= T; ++t) {
    const auto next = simulate_onestep(params, geom, y.slice(t - 1), rng, t);
    std::copy(next.begin(), next.end(), y.slice(t).begin());
  }
  return y;
}

CountTensor simulate(const Params& params, const LatticeGeom& geom,
                     const SimConfig& config) {
  if (config.seed_count < 0) throw invalid_argument("simulate: seed_count must be >= 0");
  std::vector<std::int64_t> seed(
      static_cast<std::size_t>(params.n_colors()) * geom.n_tiles(), config.seed_count);
  Rng rng(config.rng_seed);
  return simulate_from(params, geom, seed, config.T, rng);
}

}  // namespace mcg
