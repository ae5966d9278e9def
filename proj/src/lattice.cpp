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

#include "mcg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcg/error.hpp"

namespace mcg {

LatticeGeom LatticeGeom::from_adjacency(std::vector<std::vector<int>> adjacency,
                                        int side) {
  const int n_tiles = static_cast<int>(adjacency.size());
  if (n_tiles == 0) throw invalid_argument("lattice: no tiles");

  LatticeGeom geom;
  geom.side_ = side;
  geom.offsets_.reserve(adjacency.size() + 1);
  geom.offsets_.push_back(0);
  for (int i = 0; i < n_tiles; ++i) {
    auto& list = adjacency[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (int j : list) {
      if (j < 0 || j >= n_tiles) {
        throw invalid_argument("lattice: tile " + std::to_string(i) +
                               " has out-of-range neighbour " + std::to_string(j));
      }
    }
    if (!std::binary_search(list.begin(), list.end(), i)) {
      throw invalid_argument("lattice: tile " + std::to_string(i) +
                             " is not in its own neighbourhood");
    }
    geom.indices_.insert(geom.indices_.end(), list.begin(), list.end());
    geom.offsets_.push_back(geom.indices_.size());
  }
  for (int i = 0; i < n_tiles; ++i) {
    for (int j : geom.neighbors(i)) {
      const auto back = geom.neighbors(j);
      if (!std::binary_search(back.begin(), back.end(), i)) {
        throw invalid_argument("lattice: adjacency not symmetric between " +
                               std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
  return geom;
}

std::span<const int> LatticeGeom::neighbors(int tile) const {
  if (tile < 0 || tile >= n_tiles()) {
    throw invalid_argument("lattice: tile index " + std::to_string(tile) +
                           " out of range");
  }
  return {indices_.data() + offsets_[tile], offsets_[tile + 1] - offsets_[tile]};
}

int LatticeGeom::n_neighbors(int tile) const {
  return static_cast<int>(neighbors(tile).size());
}

LatticeGeom build_grid(int n) {
  if (n < 1) throw invalid_argument("grid side must be >= 1, got " + std::to_string(n));
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      auto& list = adjacency[r * n + c];
      if (r > 0) list.push_back((r - 1) * n + c);
      if (c > 0) list.push_back(r * n + c - 1);
      list.push_back(r * n + c);
      if (c + 1 < n) list.push_back(r * n + c + 1);
      if (r + 1 < n) list.push_back((r + 1) * n + c);
    }
  }
  return LatticeGeom::from_adjacency(std::move(adjacency), n);
}

double neighbor_mean_log(std::span<const std::int64_t> counts_prev,
                         const LatticeGeom& geom, int tile) {
  if (static_cast<int>(counts_prev.size()) != geom.n_tiles()) {
    throw invalid_argument("neighbor_mean_log: expected " +
                           std::to_string(geom.n_tiles()) + " counts, got " +
                           std::to_string(counts_prev.size()));
  }
  const auto nb = geom.neighbors(tile);
  double sum = 0.0;
  for (int j : nb) sum += std::log1p(static_cast<double>(counts_prev[j]));
  return sum / static_cast<double>(nb.size());
}

}  // namespace mcg
