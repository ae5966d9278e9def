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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcg/model.hpp"
#include "mcg/selection.hpp"

namespace mcg {

/// alpha = -0.1 for every color with one of the three 3x3 interaction
/// matrices used in the simulation study. Model 3 carries its sparsity mask.
Params preset_model(int model_id);

/// Initial count per tile and color for the simulation study. Estimator
/// variance falls as this grows: about 17e-4 at 1, 6.5e-4 at 10 for model 1
/// with T = 10.
inline constexpr std::int64_t kStudySeedCount = 10;

struct MCDesign {
  int model_id = 1;
  std::optional<Params> custom;
  int n = 25;
  int T = 10;
  int n_replicates = 200;
  std::vector<double> levels{0.90, 0.95, 0.99};
  std::vector<Criterion> criteria{Criterion::aic, Criterion::bic};
  std::uint64_t rng_seed = 1;
  std::int64_t seed_count = kStudySeedCount;
  int bootstrap_B = 0;  // 0 disables bootstrap coverage
  int threads = 0;      // 0 = default_threads()
  /// Replicates fitted with the full mask (tables 1 and 2) even when the
  /// true model is sparse.
  bool fit_full_model = true;

  Params truth() const;
};

struct Summary {
  double value = 0.0;
  double se = 0.0;
};

struct CoverageCell {
  double level = 0.0;
  std::string method;  // "sandwich" or "bootstrap"
  Summary rate;        // fraction in [0, 1]
};

struct SelectionErrors {
  Criterion criterion = Criterion::bic;
  Summary type_a;  // percent
  Summary type_b;  // percent
};

struct MonteCarloReport {
  int table = 0;
  MCDesign design;
  int n_ok = 0;
  int n_failed = 0;
  std::vector<std::string> names;
  Eigen::VectorXd truth;
  // Table 1, raw units. The JSON report scales bias^2 by 1e6 and variance by 1e4.
  Eigen::VectorXd bias_sq;
  Eigen::VectorXd variance;
  Summary bias_sq_mean;
  Summary variance_mean;
  // Table 2.
  std::vector<CoverageCell> coverage;
  // Table 3.
  std::vector<SelectionErrors> selection;
};

MonteCarloReport run_table1(const MCDesign& design);
MonteCarloReport run_table2(const MCDesign& design);
MonteCarloReport run_table3(const MCDesign& design);
MonteCarloReport run_table(int table, const MCDesign& design);

/// Misses and false inclusions of `selected` relative to `truth`, over the
/// interaction entries only.
struct MaskErrors {
  int missed = 0;
  int true_terms = 0;
  int extra = 0;
  int null_terms = 0;
};
MaskErrors compare_masks(const Mask& truth, const Mask& selected);

}  // namespace mcg
