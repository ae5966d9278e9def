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

#include "mcg/bootstrap.hpp"

#include <optional>
#include <string>
#include <vector>

#include "mcg/parallel.hpp"
#include "mcg/simulate.hpp"

namespace mcg {

namespace {

// Retries draw from a disjoint family of streams.
constexpr std::uint64_t kRetrySalt = 0xB5AD4ECEDA1CE2A9ULL;

std::optional<Eigen::VectorXd> refit(const Params& theta, const LatticeGeom& geom,
                                     std::span<const std::int64_t> seed_slice, int T,
                                     Rng rng, const FitOptions& options) {
  try {
    const CountTensor y = simulate_from(theta, geom, seed_slice, T, rng);
    return fit(y, geom, theta.mask(), options).params_hat.free_vector();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument) throw;
    return std::nullopt;
  }
}

}  // namespace

BootstrapResult parametric_bootstrap(const FitResult& fit_result,
                                     std::span<const std::int64_t> seed_slice,
                                     const LatticeGeom& geom, int T, int B,
                                     std::uint64_t rng_seed,
                                     const BootstrapOptions& options) {
  if (!fit_result.converged) throw invalid_argument("bootstrap: fit did not converge");
  if (B < 2) throw invalid_argument("bootstrap: B must be >= 2, got " + std::to_string(B));
  if (T < 1) throw invalid_argument("bootstrap: T must be >= 1");

  const Params& theta = fit_result.params_hat;
  const int p = theta.n_free();
  std::vector<std::optional<Eigen::VectorXd>> draws(B);
  std::vector<char> retried(B, 0);

  parallel_for(static_cast<std::size_t>(B), options.threads, [&](std::size_t b) {
    auto est = refit(theta, geom, seed_slice, T, Rng::stream(rng_seed, b), options.fit);
    if (!est) {
      retried[b] = 1;
      est = refit(theta, geom, seed_slice, T, Rng::stream(rng_seed ^ kRetrySalt, b),
                  options.fit);
    }
    draws[b] = std::move(est);
  });

  BootstrapResult out;
  out.B = B;
  for (int b = 0; b < B; ++b) {
    out.retried += retried[b];
    if (!draws[b]) ++out.failed;
  }
  if (out.failed * 10 > B) {
    throw Error(ErrorCode::bootstrap_failed,
                "bootstrap: " + std::to_string(out.failed) + " of " + std::to_string(B) +
                    " replicates failed to refit");
  }
  const int ok = B - out.failed;
  if (ok < 2) throw Error(ErrorCode::bootstrap_failed, "bootstrap: fewer than 2 replicates");

  out.estimates.resize(ok, p);
  int row = 0;
  for (int b = 0; b < B; ++b) {
    if (draws[b]) out.estimates.row(row++) = draws[b]->transpose();
  }
  out.mean = out.estimates.colwise().mean().transpose();
  const Eigen::MatrixXd centered = out.estimates.rowwise() - out.mean.transpose();
  out.cov_boot = centered.transpose() * centered / static_cast<double>(ok - 1);
  out.se_boot = out.cov_boot.diagonal().cwiseSqrt();
  return out;
}

}  // namespace mcg
