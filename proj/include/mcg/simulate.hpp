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
#include <random>
#include <span>
#include <vector>

#include "mcg/lattice.hpp"
#include "mcg/model.hpp"

namespace mcg {

/// Seeded 64-bit stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; uniform and Poisson transforms are implemented
/// here so that draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for replicate `index` of a run seeded with `base`.
  static Rng stream(std::uint64_t base, std::uint64_t index);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  std::int64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Log-intensities above this are rejected as an exploding process.
inline constexpr double kMaxLogIntensity = 700.0;
/// Largest intensity whose draws still fit comfortably in an int64 count.
inline constexpr double kMaxIntensity = 1e15;

struct SimConfig {
  std::int64_t seed_count = 1;
  int T = 1;
  std::uint64_t rng_seed = 0;
};

/// Forward simulation from a constant seed slice.
CountTensor simulate(const Params& params, const LatticeGeom& geom,
                     const SimConfig& config);

/// Forward simulation from an arbitrary t = 0 slice laid out [color][tile].
CountTensor simulate_from(const Params& params, const LatticeGeom& geom,
                          std::span<const std::int64_t> seed_slice, int T,
                          Rng& rng);

/// One conditional draw. Variates are consumed color-major, tile ascending.
/// `t` only labels error messages.
std::vector<std::int64_t> simulate_onestep(const Params& params,
                                           const LatticeGeom& geom,
                                           std::span<const std::int64_t> prev,
                                           Rng& rng, int t = 1);

/// Intensities exp(v) for the slice following `prev`, laid out [color][tile].
std::vector<double> onestep_intensity(const Params& params,
                                      const LatticeGeom& geom,
                                      std::span<const std::int64_t> prev,
                                      int t = 1);

}  // namespace mcg
