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

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mcg/bootstrap.hpp"
#include "mcg/experiments.hpp"
#include "mcg/inference.hpp"
#include "mcg/selection.hpp"
#include "mcg/simulate.hpp"

using namespace mcg;

namespace {

// Best of all 2^(k*k) joint masks, smallest model first on ties.
Mask joint_best(const Design& d, Criterion crit) {
  const int k = d.n_colors();
  Mask best;
  double best_value = 0.0;
  int best_size = 0;
  for (unsigned bits = 0; bits < (1u << (k * k)); ++bits) {
    Mask m(k, k);
    for (int j = 0; j < k * k; ++j) m(j / k, j % k) = (bits >> j) & 1u;
    const FitResult f = fit(d, m);
    const double v = crit == Criterion::aic ? f.aic : f.bic;
    const int size = static_cast<int>(m.count());
    if (best.size() == 0 || v < best_value - 1e-9 ||
        (std::fabs(v - best_value) <= 1e-9 && size < best_size)) {
      best = m;
      best_value = v;
      best_size = size;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("criterion arithmetic") {
  CHECK(criterion_penalty(Criterion::aic, 625, 10) == 2.0);
  CHECK(criterion_penalty(Criterion::bic, 625, 10) == doctest::Approx(std::log(6250.0)));
  CHECK(criterion_value(Criterion::aic, -10.0, 3, 625, 10) == doctest::Approx(26.0));
  CHECK(parse_criterion("AIC") == Criterion::aic);
  CHECK(parse_criterion("bic") == Criterion::bic);
  CHECK_THROWS_AS(parse_criterion("hqic"), Error);
}

TEST_CASE("tie rule prefers smaller then lexicographically smaller rows") {
  Candidate a{{false, true}, 0.0, 10.0, true, {}};
  Candidate b{{true, true}, 0.0, 10.0 + 1e-12, true, {}};
  Candidate c{{true, false}, 0.0, 10.0, true, {}};
  Candidate worse{{false, false}, 0.0, 11.0, true, {}};
  CHECK(candidate_better(a, b));
  CHECK_FALSE(candidate_better(b, a));
  CHECK(candidate_better(a, c));
  CHECK(candidate_better(c, worse));
  Candidate failed{{false, false}, 0.0, 0.0, false, "x"};
  CHECK(candidate_better(worse, failed));
}

TEST_CASE("per-color search equals joint search at two colors") {
  const auto g = build_grid(5);
  Rng rng(77);
  for (int rep = 0; rep < 12; ++rep) {
    Eigen::VectorXd a(2);
    Eigen::MatrixXd b(2, 2);
    for (int j = 0; j < 2; ++j) a[j] = 0.6 * rng.uniform() - 0.1;
    for (int j = 0; j < 4; ++j) b(j / 2, j % 2) = rng.uniform() < 0.5 ? 0.0 : 1.2 * rng.uniform() - 0.6;
    const auto y = simulate(Params(a, b), g, {2, 4, 900 + static_cast<std::uint64_t>(rep)});
    const Design d = make_design(y, g);
    for (Criterion crit : {Criterion::aic, Criterion::bic}) {
      const auto [sel, f] = select(d, crit);
      CHECK((sel.best_mask == joint_best(d, crit)).all());
      const double refit = crit == Criterion::aic ? fit(d, sel.best_mask).aic : fit(d, sel.best_mask).bic;
      CHECK(sel.best_value == doctest::Approx(refit).epsilon(1e-10));
      CHECK(sel.best_value <= (crit == Criterion::aic ? fit(d, full_mask(2)).aic : fit(d, full_mask(2)).bic) + 1e-9);
      for (int c = 0; c < 2; ++c) {
        for (int e = 0; e < 2; ++e) {
          if (!sel.best_mask(c, e)) CHECK(f.params_hat.beta()(c, e) == 0.0);
        }
      }
      CHECK(sel.per_color_tables.size() == 2);
      CHECK(sel.per_color_tables[0].size() == 4);
    }
  }
}

TEST_CASE("bic drops null interactions on a single color") {
  const auto g = build_grid(25);
  const Params truth(Eigen::VectorXd::Constant(1, 0.3), Eigen::MatrixXd::Zero(1, 1));
  int dropped = 0;
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    const auto y = simulate(truth, g, {1, 8, 3000 + rep});
    dropped += !select(y, g, Criterion::bic).first.best_mask(0, 0);
  }
  CHECK(dropped >= 38);
}

TEST_CASE("true mask gives zero selection errors") {
  const Mask truth = preset_model(3).mask();
  const MaskErrors e = compare_masks(truth, truth);
  CHECK(e.missed == 0);
  CHECK(e.extra == 0);
  CHECK(e.true_terms == 5);
  CHECK(e.null_terms == 4);
  const MaskErrors all = compare_masks(truth, full_mask(3));
  CHECK(all.extra == 4);
}

TEST_CASE("selection guards") {
  const auto y = testing::random_counts(2, 21, 4, 1.0, 1);
  CHECK_THROWS_AS(select(y, build_grid(2), Criterion::bic), Error);
}

TEST_CASE("bootstrap determinism and summary") {
  const auto g = build_grid(12);
  const Params truth = preset_model(1);
  const auto y = simulate(truth, g, {10, 6, 17});
  const FitResult f = fit(y, g, full_mask(3));
  BootstrapOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto b1 = parametric_bootstrap(f, y.slice(0), g, 6, 24, 99, one);
  const auto b2 = parametric_bootstrap(f, y.slice(0), g, 6, 24, 99, many);
  CHECK(b1.estimates == b2.estimates);
  CHECK(b1.cov_boot == b2.cov_boot);
  CHECK(b1.estimates.rows() == 24);
  const Eigen::MatrixXd centered = b1.estimates.rowwise() - b1.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 23.0;
  CHECK(b1.cov_boot.isApprox(cov, 1e-12));
  CHECK(b1.se_boot.isApprox(cov.diagonal().cwiseSqrt(), 1e-12));
  for (int j = 0; j < f.n_free(); ++j) {
    CHECK(std::fabs(b1.mean[j] - f.params_hat.free_vector()[j]) < 3.0 * f.se[j]);
  }
  CHECK_THROWS_AS(parametric_bootstrap(f, y.slice(0), g, 6, 1, 99, one), Error);
}

TEST_CASE("bootstrap agrees with sandwich for beta zero data") {
  const auto g = build_grid(25);
  const Params truth(Eigen::VectorXd::Constant(2, 0.5), Eigen::MatrixXd::Zero(2, 2));
  const auto y = simulate(truth, g, {2, 10, 8});
  const FitResult f = fit(y, g, full_mask(2));
  const auto b = parametric_bootstrap(f, y.slice(0), g, 10, 200, 1234);
  for (int j = 0; j < f.n_free(); ++j) {
    CHECK(b.se_boot[j] / f.se[j] == doctest::Approx(1.0).epsilon(0.2));
  }
}

TEST_CASE("bootstrap respects the mask") {
  const auto g = build_grid(10);
  const Params truth = preset_model(3);
  const auto y = simulate(truth, g, {10, 5, 3});
  const FitResult f = fit(y, g, truth.mask());
  const auto b = parametric_bootstrap(f, y.slice(0), g, 5, 10, 5);
  CHECK(b.estimates.cols() == truth.n_free());
}
