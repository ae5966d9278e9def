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

#include <Eigen/Dense>

#include "mcg/inference.hpp"
#include "mcg/lattice.hpp"

namespace mcg {

struct BootstrapResult {
  int B = 0;
  Eigen::MatrixXd estimates;  // successful replicates x free coordinates
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov_boot;
  Eigen::VectorXd se_boot;
  int retried = 0;
  int failed = 0;
};

struct BootstrapOptions {
  int threads = 0;  // 0 = default_threads()
  FitOptions fit;
};

/// Resimulates `T` steps from `seed_slice` under the fitted parameters, refits
/// each trajectory with the same mask and summarises the estimates.
BootstrapResult parametric_bootstrap(const FitResult& fit,
                                     std::span<const std::int64_t> seed_slice,
                                     const LatticeGeom& geom, int T, int B,
                                     std::uint64_t rng_seed,
                                     const BootstrapOptions& options = {});

}  // namespace mcg
