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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcg/bootstrap.hpp"
#include "mcg/experiments.hpp"
#include "mcg/inference.hpp"
#include "mcg/model.hpp"
#include "mcg/predict.hpp"
#include "mcg/selection.hpp"

namespace mcg {

inline constexpr const char* kVersion = "0.3.0";

/// Count tensor on an n x n grid plus color labels.
struct GridCounts {
  int n = 0;
  CountTensor counts;
  std::vector<std::string> colors;
};

struct CellRow {
  int t = 0;
  double x = 0.0;
  double y = 0.0;
  std::string color;
};

struct CellTable {
  std::vector<CellRow> rows;
  std::vector<int> lines;  // source line of each row, for error messages
};

struct Bounds {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
};

CellTable read_cells_csv(std::istream& in, const std::string& where = "cells");
CellTable read_cells_csv(const std::string& path);

Bounds bounding_box(const CellTable& cells);

/// Bins cells into an n x n row-major grid. Row comes from y, column from x,
/// both floor(n (v - min) / (max - min)) clamped to n - 1.
GridCounts tile_cells(const CellTable& cells, int n,
                      const std::optional<Bounds>& bounds = std::nullopt);

/// Counts CSV: an optional "# mcg-counts" metadata line, header
/// t,row,col,color,count, nonzero rows in (t, color, row, col) order.
void write_counts_csv(std::ostream& out, const GridCounts& counts);
void write_counts_csv(const std::string& path, const GridCounts& counts);
GridCounts read_counts_csv(std::istream& in, const std::string& where = "counts");
GridCounts read_counts_csv(const std::string& path);

Params params_from_json(const nlohmann::json& doc);
nlohmann::json params_to_json(const Params& params);
Params read_params_json(const std::string& path);

/// Accepts {"mask": [[...]]} or a bare nested array of booleans / 0-1.
Mask mask_from_json(const nlohmann::json& doc);
Mask read_mask_json(const std::string& path);

struct FitMeta {
  int n = 0;
  std::vector<std::string> colors;
  double ci_level = 0.95;
  std::optional<Criterion> criterion;
  std::optional<SelectionResult> selection;
};

nlohmann::json fit_to_json(const FitResult& fit, const FitMeta& meta);

nlohmann::json bootstrap_to_json(const FitResult& fit, const BootstrapResult& boot,
                                 double ci_level, std::uint64_t rng_seed);

nlohmann::json report_to_json(const MonteCarloReport& report);

struct QQRow {
  int t = 0;
  int color = 0;
  QQBand band;
};
void write_qq_csv(std::ostream& out, const std::vector<QQRow>& rows,
                  const std::vector<std::string>& colors);

void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

}  // namespace mcg
