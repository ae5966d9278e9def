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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mcg {

/// Tile adjacency for a lattice. Every tile is its own neighbour and the
/// relation is symmetric. Lists are stored in compressed row form and sorted
/// ascending, so lookups during likelihood evaluation are a contiguous scan.
class LatticeGeom {
 public:
  /// Validates an arbitrary adjacency (self-inclusive, symmetric, in range).
  /// `side` is the grid side for rectangular lattices, 0 otherwise.
  static LatticeGeom from_adjacency(std::vector<std::vector<int>> adjacency,
                                    int side = 0);

  int side() const noexcept { return side_; }
  int n_tiles() const noexcept { return static_cast<int>(offsets_.size()) - 1; }

  std::span<const int> neighbors(int tile) const;
  int n_neighbors(int tile) const;

  /// Row-major index for rectangular grids.
  int tile_index(int row, int col) const noexcept { return row * side_ + col; }

 private:
  LatticeGeom() = default;

  int side_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> indices_;
};

/// n x n rectangular grid with rook adjacency plus self, no wraparound.
LatticeGeom build_grid(int n);

/// Mean of log(1 + count) over the neighbourhood of `tile`.
double neighbor_mean_log(std::span<const std::int64_t> counts_prev,
                         const LatticeGeom& geom, int tile);

}  // namespace mcg
