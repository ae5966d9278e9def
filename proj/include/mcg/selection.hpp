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

#include <string>
#include <utility>
#include <vector>

#include "mcg/inference.hpp"

namespace mcg {

enum class Criterion { aic, bic };

const char* to_string(Criterion criterion) noexcept;
Criterion parse_criterion(const std::string& name);

/// Penalty per free coordinate: 2 for AIC, log(n_tiles * T) for BIC.
double criterion_penalty(Criterion criterion, int n_tiles, int T);
double criterion_value(Criterion criterion, double loglik, int n_free,
                       int n_tiles, int T);

struct Candidate {
  std::vector<bool> terms;  // row of the mask
  double loglik = 0.0;
  double value = 0.0;
  bool ok = false;
  std::string error;
};

struct SelectionResult {
  Mask best_mask;
  Criterion criterion = Criterion::bic;
  double best_value = 0.0;
  std::vector<std::vector<Candidate>> per_color_tables;
  int ties = 0;
  int skipped = 0;
};

struct SelectionOptions {
  int threads = 1;
  FitOptions fit;
};

inline constexpr int kMaxSelectionColors = 20;

/// Exhaustive per-color subset search over interaction terms. Intercepts are
/// always kept. Ties within 1e-9 go to the smaller model, then to the
/// lexicographically smallest term row (false < true).
std::pair<SelectionResult, FitResult> select(const Design& design,
                                             Criterion criterion,
                                             const SelectionOptions& options = {});
std::pair<SelectionResult, FitResult> select(const CountTensor& y,
                                             const LatticeGeom& geom,
                                             Criterion criterion,
                                             const SelectionOptions& options = {});

/// Returns true when candidate `a` beats `b` under the tie rule.
bool candidate_better(const Candidate& a, const Candidate& b);

}  // namespace mcg
