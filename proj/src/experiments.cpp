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

#include "mcg/experiments.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mcg/bootstrap.hpp"
#include "mcg/inference.hpp"
#include "mcg/parallel.hpp"
#include "mcg/simulate.hpp"

namespace mcg {

Params preset_model(int model_id) {
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(3, -0.1);
  Eigen::MatrixXd beta(3, 3);
  switch (model_id) {
    case 1:
      beta << 0.7, -0.7, 0.7,
              0.7, 0.7, -0.7,
              -0.7, 0.7, 0.7;
      return Params(alpha, beta);
    case 2:
      beta << 0.05, -0.15, 0.25,
              0.35, 0.45, -0.55,
              -0.65, 0.75, 0.85;
      return Params(alpha, beta);
    case 3: {
      beta << 0.7, -0.7, 0.7,
              0.0, 0.7, 0.0,
              0.0, 0.0, 0.7;
      return Params(alpha, beta, (beta.array() != 0.0));
    }
    default:
      throw invalid_argument("unknown model id " + std::to_string(model_id) + " (expected 1, 2 or 3)");
  }
}

Params MCDesign::truth() const { return custom ? *custom : preset_model(model_id); }

MaskErrors compare_masks(const Mask& truth, const Mask& selected) {
  if (truth.rows() != selected.rows() || truth.cols() != selected.cols()) {
    throw invalid_argument("compare_masks: shape mismatch");
  }
  MaskErrors e;
  for (Eigen::Index c = 0; c < truth.rows(); ++c) {
    for (Eigen::Index d = 0; d < truth.cols(); ++d) {
      if (truth(c, d)) {
        ++e.true_terms;
        e.missed += !selected(c, d);
      } else {
        ++e.null_terms;
        e.extra += selected(c, d);
      }
    }
  }
  return e;
}

namespace {

constexpr std::uint64_t kBootstrapSalt = 0x5DEECE66DULL;

struct Replicate {
  bool ok = false;
  Eigen::VectorXd theta;
  Eigen::VectorXd se;
  Eigen::VectorXd se_boot;
  std::vector<Mask> selected;  // one per criterion
};

struct Needs {
  bool sandwich = false;
  bool bootstrap = false;
  bool selection = false;
};

std::vector<Replicate> run_replicates(const MCDesign& design, const Needs& needs) {
  if (design.n_replicates < 2) throw invalid_argument("montecarlo: need at least 2 replicates");
  if (design.T < 1) throw invalid_argument("montecarlo: T must be >= 1");
  const Params truth = design.truth();
  const LatticeGeom geom = build_grid(design.n);
  const Mask fit_mask =
      design.fit_full_model ? full_mask(truth.n_colors()) : truth.mask();
  const std::vector<std::int64_t> seed(
      static_cast<std::size_t>(truth.n_colors()) * geom.n_tiles(), design.seed_count);

  std::vector<Replicate> reps(design.n_replicates);
  parallel_for(reps.size(), design.threads, [&](std::size_t r) {
    Replicate& rep = reps[r];
    try {
      Rng rng = Rng::stream(design.rng_seed, r);
      const CountTensor y = simulate_from(truth, geom, seed, design.T, rng);
      const Design d = make_design(y, geom);
      if (needs.sandwich || needs.bootstrap) {
        const FitResult f = fit(d, fit_mask);
        rep.theta = f.params_hat.free_vector();
        rep.se = f.se;
        if (needs.bootstrap) {
          BootstrapOptions bo;
          bo.threads = 1;
          const auto boot = parametric_bootstrap(
              f, y.slice(0), geom, design.T, design.bootstrap_B,
              splitmix64(design.rng_seed ^ kBootstrapSalt) + r, bo);
          rep.se_boot = boot.se_boot;
        }
      }
      if (needs.selection) {
        SelectionOptions so;
        so.threads = 1;
        for (Criterion crit : design.criteria) {
          rep.selected.push_back(select(d, crit, so).first.best_mask);
        }
      }
      rep.ok = true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::invalid_argument) throw;
      rep.ok = false;
    }
  });
  return reps;
}

MonteCarloReport start_report(int table, const MCDesign& design,
                              const std::vector<Replicate>& reps) {
  MonteCarloReport report;
  report.table = table;
  report.design = design;
  for (const auto& r : reps) (r.ok ? report.n_ok : report.n_failed) += 1;
  if (report.n_failed * 20 > static_cast<int>(reps.size())) {
    throw Error(ErrorCode::non_convergence,
                "montecarlo: " + std::to_string(report.n_failed) + " of " +
                    std::to_string(reps.size()) + " replicates failed");
  }
  if (report.n_ok < 2) throw Error(ErrorCode::non_convergence, "montecarlo: too few replicates");
  const Params truth = design.truth();
  const Params fitted_shape =
      design.fit_full_model ? Params(truth.alpha(), truth.beta()) : truth;
  report.names = fitted_shape.free_names();
  report.truth = fitted_shape.free_vector();
  return report;
}

double binomial_se(double rate, double trials) {
  return std::sqrt(std::max(0.0, rate * (1.0 - rate)) / trials);
}

}  // namespace

MonteCarloReport run_table1(const MCDesign& design) {
  const auto reps = run_replicates(design, {.sandwich = true});
  MonteCarloReport report = start_report(1, design, reps);
  const auto p = report.truth.size();
  const double n = report.n_ok;

  Eigen::MatrixXd est(report.n_ok, p);
  int row = 0;
  for (const auto& r : reps) {
    if (r.ok) est.row(row++) = r.theta.transpose();
  }
  const Eigen::VectorXd mean = est.colwise().mean().transpose();
  const Eigen::MatrixXd centered = est.rowwise() - mean.transpose();
  report.variance = centered.colwise().squaredNorm().transpose() / (n - 1.0);
  const Eigen::VectorXd bias = mean - report.truth;
  report.bias_sq = bias.cwiseAbs2();

  // Delta-method simulation errors, averaged over coordinates.
  const Eigen::VectorXd sd = report.variance.cwiseSqrt();
  const Eigen::VectorXd bias_sq_se = 2.0 * bias.cwiseAbs().cwiseProduct(sd) / std::sqrt(n);
  const Eigen::VectorXd var_se = report.variance * std::sqrt(2.0 / (n - 1.0));
  report.bias_sq_mean = {report.bias_sq.mean(), bias_sq_se.mean()};
  report.variance_mean = {report.variance.mean(), var_se.mean()};
  return report;
}

MonteCarloReport run_table2(const MCDesign& design) {
  const bool boot = design.bootstrap_B > 0;
  const auto reps = run_replicates(design, {.sandwich = true, .bootstrap = boot});
  MonteCarloReport report = start_report(2, design, reps);
  const auto p = report.truth.size();
  const double trials = static_cast<double>(report.n_ok) * static_cast<double>(p);

  for (double level : design.levels) {
    const double z = normal_quantile(0.5 + 0.5 * level);
    for (const char* method : {"sandwich", "bootstrap"}) {
      const bool use_boot = std::string(method) == "bootstrap";
      if (use_boot && !boot) continue;
      double hits = 0.0;
      for (const auto& r : reps) {
        if (!r.ok) continue;
        const Eigen::VectorXd& se = use_boot ? r.se_boot : r.se;
        for (Eigen::Index j = 0; j < p; ++j) {
          hits += std::fabs(r.theta[j] - report.truth[j]) <= z * se[j];
        }
      }
      const double rate = hits / trials;
      report.coverage.push_back({level, method, {rate, binomial_se(rate, trials)}});
    }
  }
  return report;
}

MonteCarloReport run_table3(const MCDesign& design) {
  const auto reps = run_replicates(design, {.selection = true});
  MonteCarloReport report = start_report(3, design, reps);
  const Mask truth_mask = design.truth().mask();

  for (std::size_t k = 0; k < design.criteria.size(); ++k) {
    long missed = 0, true_terms = 0, extra = 0, null_terms = 0;
    for (const auto& r : reps) {
      if (!r.ok) continue;
      const MaskErrors e = compare_masks(truth_mask, r.selected[k]);
      missed += e.missed;
      true_terms += e.true_terms;
      extra += e.extra;
      null_terms += e.null_terms;
    }
    SelectionErrors se;
    se.criterion = design.criteria[k];
    if (true_terms > 0) {
      const double rate = static_cast<double>(missed) / true_terms;
      se.type_a = {100.0 * rate, 100.0 * binomial_se(rate, true_terms)};
    }
    if (null_terms > 0) {
      const double rate = static_cast<double>(extra) / null_terms;
      se.type_b = {100.0 * rate, 100.0 * binomial_se(rate, null_terms)};
    }
    report.selection.push_back(se);
  }
  return report;
}

MonteCarloReport run_table(int table, const MCDesign& design) {
  switch (table) {
    case 1: return run_table1(design);
    case 2: return run_table2(design);
    case 3: return run_table3(design);
    default:
      throw invalid_argument("unknown table " + std::to_string(table) + " (expected 1, 2 or 3)");
  }
}

}  // namespace mcg
