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

#include "mcg/selection.hpp"

#include <cmath>
#include <string>

#include "mcg/parallel.hpp"

namespace mcg {

const char* to_string(Criterion criterion) noexcept {
  return criterion == Criterion::aic ? "aic" : "bic";
}

Criterion parse_criterion(const std::string& name) {
  if (name == "aic" || name == "AIC") return Criterion::aic;
  if (name == "bic" || name == "BIC") return Criterion::bic;
  throw invalid_argument("unknown criterion '" + name + "' (expected aic or bic)");
}

double criterion_penalty(Criterion criterion, int n_tiles, int T) {
  return criterion == Criterion::aic
             ? 2.0
             : std::log(static_cast<double>(n_tiles) * static_cast<double>(T));
}

double criterion_value(Criterion criterion, double loglik, int n_free, int n_tiles, int T) {
  return -2.0 * loglik + n_free * criterion_penalty(criterion, n_tiles, T);
}

namespace {

constexpr double kTieTol = 1e-9;

int size_of(const std::vector<bool>& terms) {
  int k = 0;
  for (bool b : terms) k += b;
  return k;
}

}  // namespace

bool candidate_better(const Candidate& a, const Candidate& b) {
  if (!a.ok) return false;
  if (!b.ok) return true;
  if (a.value < b.value - kTieTol) return true;
  if (b.value < a.value - kTieTol) return false;
  const int sa = size_of(a.terms);
  const int sb = size_of(b.terms);
  if (sa != sb) return sa < sb;
  return a.terms < b.terms;
}

std::pair<SelectionResult, FitResult> select(const Design& design, Criterion criterion,
                                             const SelectionOptions& options) {
  const int k = design.n_colors();
  if (k > kMaxSelectionColors) {
    throw invalid_argument("select: exhaustive search limited to " +
                           std::to_string(kMaxSelectionColors) + " colors");
  }
  const std::size_t n_subsets = std::size_t{1} << k;
  const std::size_t full = n_subsets - 1;

  SelectionResult result;
  result.criterion = criterion;
  result.best_mask = Mask::Constant(k, k, false);
  result.per_color_tables.assign(k, std::vector<Candidate>(n_subsets));

  parallel_for(static_cast<std::size_t>(k) * n_subsets, options.threads, [&](std::size_t job) {
    const int c = static_cast<int>(job / n_subsets);
    const std::size_t subset = job % n_subsets;
    Candidate& cand = result.per_color_tables[c][subset];
    cand.terms.assign(k, false);
    std::vector<int> cols{0};
    for (int d = 0; d < k; ++d) {
      if (subset & (std::size_t{1} << d)) {
        cand.terms[d] = true;
        cols.push_back(1 + d);
      }
    }
    try {
      const ColorFit cf = fit_color(design, c, cols, options.fit);
      cand.loglik = cf.loglik;
      cand.value = criterion_value(criterion, cf.loglik, static_cast<int>(cols.size()),
                                   design.n_tiles, design.T);
      cand.ok = true;
    } catch (const Error& e) {
      cand.error = e.what();
    }
  });

  for (int c = 0; c < k; ++c) {
    const auto& table = result.per_color_tables[c];
    if (!table[full].ok) {
      throw Error(ErrorCode::non_convergence,
                  "select: full model failed for color " + std::to_string(c) + ": " +
                      table[full].error);
    }
    const Candidate* best = nullptr;
    for (const auto& cand : table) {
      if (!cand.ok) {
        ++result.skipped;
        continue;
      }
      if (best && std::fabs(cand.value - best->value) < kTieTol) ++result.ties;
      if (!best || candidate_better(cand, *best)) best = &cand;
    }
    for (int d = 0; d < k; ++d) result.best_mask(c, d) = best->terms[d];
  }

  FitResult best_fit = fit(design, result.best_mask, options.fit);
  result.best_value = criterion_value(criterion, best_fit.loglik, best_fit.n_free(),
                                      design.n_tiles, design.T);
  return {std::move(result), std::move(best_fit)};
}

std::pair<SelectionResult, FitResult> select(const CountTensor& y, const LatticeGeom& geom,
                                             Criterion criterion,
                                             const SelectionOptions& options) {
  return select(make_design(y, geom), criterion, options);
}

}  // namespace mcg
