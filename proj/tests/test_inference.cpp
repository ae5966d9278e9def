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
#include "mcg/inference.hpp"
#include "mcg/lattice.hpp"
#include "mcg/simulate.hpp"

using namespace mcg;

namespace {

const LatticeGeom& g4() {
  static const LatticeGeom g = build_grid(4);
  return g;
}

}  // namespace

TEST_CASE("loglik golden values") {
  const auto g1 = build_grid(1);
  CountTensor y(1, 1, 1);
  y.at(1, 0, 0) = 2;
  const Params zero(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1));
  CHECK(loglik(zero, make_design(y, g1)) == doctest::Approx(-1.0));

  CountTensor z(3, 2, 16);
  const Params z2(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2));
  CHECK(loglik(z2, make_design(z, g4())) == doctest::Approx(-16.0 * 3 * 2));

  const auto fx = testing::fixture_counts();
  Eigen::VectorXd a(2);
  a << 0.3, 0.1;
  Eigen::MatrixXd b(2, 2);
  b << 0.4, -0.3, 0.2, 0.5;
  CHECK(loglik(Params(a, b), make_design(fx, g4())) ==
        doctest::Approx(testing::brute_loglik(a, b, fx, 4)).epsilon(1e-13));
}

TEST_CASE("fit matches an independent GLM solver on the fixture") {
  const auto fx = testing::fixture_counts();
  const Design d = make_design(fx, g4());
  const FitResult f = fit(d, full_mask(2));
  CHECK(f.converged);
  CHECK(f.grad_norm <= 1e-8);
  const double coef[] = {0.9726059280290282, -0.06321550297070602, -0.3950749428047006,
                         0.33042607369829397, 0.3381347188453998, 0.18955653701029068};
  const double se[] = {0.7221974307212112, 0.4381277669201948, 0.5653390457185473,
                       0.5998240275388308, 0.36541392936100475, 0.43887468716584865};
  const Eigen::VectorXd theta = f.params_hat.free_vector();
  for (int j = 0; j < 6; ++j) {
    CHECK(theta[j] == doctest::Approx(coef[j]).epsilon(1e-7));
    CHECK(f.se[j] == doctest::Approx(se[j]).epsilon(1e-6));
  }
  CHECK(f.loglik == doctest::Approx(-40.796630952168115 - 13.944983774629975).epsilon(1e-12));
  CHECK(f.aic == doctest::Approx(-2.0 * f.loglik + 12.0));
  CHECK(f.bic == doctest::Approx(-2.0 * f.loglik + 6.0 * std::log(48.0)));

  Mask m = full_mask(2);
  m(0, 1) = false;
  m(1, 1) = false;
  const FitResult r = fit(d, m);
  CHECK(r.params_hat.beta()(0, 1) == 0.0);
  CHECK(r.params_hat.alpha()[0] == doctest::Approx(0.5597987307599723).epsilon(1e-7));
  CHECK(r.params_hat.beta()(0, 0) == doctest::Approx(-0.1067385259011183).epsilon(1e-7));
  CHECK(r.params_hat.alpha()[1] == doctest::Approx(0.5355198064642266).epsilon(1e-7));
  CHECK(r.params_hat.beta()(1, 0) == doctest::Approx(0.3541566791956948).epsilon(1e-7));
  CHECK(r.loglik == doctest::Approx(-41.04592637198455 - 14.037294905223519).epsilon(1e-12));
}

TEST_CASE("score matches central differences") {
  Rng rng(2024);
  for (int rep = 0; rep < 25; ++rep) {
    const auto y = testing::random_counts(3, 2, 16, 0.5 + 3.0 * rng.uniform(), 100 + rep);
    const Design d = make_design(y, g4());
    Mask mask = full_mask(2);
    if (rep % 3 == 1) mask(1, 0) = false;
    Eigen::VectorXd theta(2 + mask.count());
    for (auto& v : theta) v = rng.uniform() - 0.5;
    Eigen::VectorXd alpha;
    Eigen::MatrixXd beta;
    testing::unpack(theta, mask, alpha, beta);
    const Params p(alpha, beta, mask);
    const Eigen::VectorXd u = score(p, d);
    const double h = 1e-6;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp[j] += h;
      tm[j] -= h;
      const double fd = (testing::brute_loglik(tp, mask, y, 4) - testing::brute_loglik(tm, mask, y, 4)) /
                        (2 * h) / 16.0;
      CHECK(u[j] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("score vanishes when counts equal the intensity") {
  // Non-integer pseudo-counts through the design directly.
  const auto y = testing::random_counts(3, 2, 16, 2.0, 4);
  Design d = make_design(y, g4());
  Eigen::VectorXd a(2);
  a << 0.2, -0.3;
  Eigen::MatrixXd b(2, 2);
  b << 0.1, 0.4, -0.2, 0.3;
  const Params p(a, b);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd coef(3);
    coef << a[c], b.row(c).transpose();
    d.y.col(c) = (d.x * coef).array().exp().matrix();
  }
  CHECK(score(p, d).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("sandwich covariance equals the inverse numeric Hessian") {
  const auto fx = testing::fixture_counts();
  const Design d = make_design(fx, g4());
  const FitResult f = fit(d, full_mask(2));
  const Eigen::VectorXd theta = f.params_hat.free_vector();
  const Mask mask = full_mask(2);
  const double h = 1e-4;
  const Eigen::Index p = theta.size();
  Eigen::MatrixXd hess(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::VectorXd t = theta;
        t[i] += si;
        t[j] += sj;
        return testing::brute_loglik(t, mask, fx, 4);
      };
      hess(i, j) = -(at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
    }
  }
  const Eigen::MatrixXd numeric = hess.inverse();
  const double scale = numeric.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) CHECK(std::fabs(f.cov(i, j) - numeric(i, j)) <= 1e-4 * scale);
  }
  CHECK(f.cov.isApprox(f.cov.transpose()));
  CHECK(f.cov(0, 3) == 0.0);  // block diagonal across colors
}

TEST_CASE("intercept-only variance closed form") {
  const auto y = testing::random_counts(4, 1, 16, 2.3, 8);
  Mask m(1, 1);
  m(0, 0) = false;
  const FitResult f = fit(y, g4(), m);
  double total = 0.0;
  for (int t = 1; t <= 4; ++t) {
    for (auto v : y.slice(t)) total += static_cast<double>(v);
  }
  CHECK(f.params_hat.alpha()[0] == doctest::Approx(std::log(total / 64.0)).epsilon(1e-10));
  CHECK(f.cov(0, 0) == doctest::Approx(1.0 / total).epsilon(1e-10));
}

TEST_CASE("full fit is the concatenation of per-color fits") {
  const auto y = testing::random_counts(5, 3, 36, 1.7, 21);
  const Design d = make_design(y, build_grid(6));
  const FitResult f = fit(d, full_mask(3));
  for (int c = 0; c < 3; ++c) {
    const std::vector<int> cols{0, 1, 2, 3};
    const ColorFit cf = fit_color(d, c, cols);
    CHECK(f.params_hat.alpha()[c] == cf.coef[0]);
    for (int j = 0; j < 3; ++j) CHECK(f.params_hat.beta()(c, j) == cf.coef[1 + j]);
  }
}

TEST_CASE("beta zero truth gives intercepts near the log mean") {
  const Params truth(Eigen::VectorXd::Constant(2, 0.4), Eigen::MatrixXd::Zero(2, 2));
  const auto y = simulate(truth, build_grid(30), {2, 6, 31});
  const FitResult f = fit(y, build_grid(30), full_mask(2));
  const auto ci = confidence_intervals(f, 0.99);
  for (int c = 0; c < 2; ++c) {
    double sum = 0.0;
    for (int t = 1; t <= 6; ++t) {
      for (auto v : y.slice(t, c)) sum += static_cast<double>(v);
    }
    const double log_mean = std::log(sum / (6.0 * 900.0));
    const int a = f.params_hat.block_offset(c);
    CHECK(std::fabs(f.params_hat.alpha()[c] - log_mean) < 3.0 * f.se[a]);
    for (int d = 0; d < 2; ++d) {
      const auto [lo, hi] = ci[f.params_hat.block_offset(c) + 1 + d];
      CHECK(lo < 0.0);
      CHECK(hi > 0.0);
    }
  }
}

TEST_CASE("truth beats a perturbation on model 1 data") {
  Eigen::MatrixXd b(3, 3);
  b << 0.7, -0.7, 0.7, 0.7, 0.7, -0.7, -0.7, 0.7, 0.7;
  const Params truth(Eigen::VectorXd::Constant(3, -0.1), b);
  const auto g = build_grid(25);
  Rng prng(5);
  int wins = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto y = simulate(truth, g, {10, 10, 500 + static_cast<std::uint64_t>(rep)});
    Eigen::VectorXd theta = truth.free_vector();
    for (auto& v : theta) v += 0.1 * (2.0 * prng.uniform() - 1.0);
    const Design d = make_design(y, g);
    wins += loglik(truth, d) > loglik(truth.with_free(theta), d);
  }
  CHECK(wins >= 19);
}

TEST_CASE("confidence intervals") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  const auto fx = testing::fixture_counts();
  const FitResult f = fit(fx, g4(), full_mask(2));
  const auto ci = confidence_intervals(f, 0.95);
  for (int j = 0; j < f.n_free(); ++j) {
    const double mid = f.params_hat.free_vector()[j];
    CHECK(ci[j].second - mid == doctest::Approx(1.959963984540054 * f.se[j]));
    CHECK(mid - ci[j].first == doctest::Approx(1.959963984540054 * f.se[j]));
  }
  CHECK_THROWS_AS(confidence_intervals(f, 1.0), Error);
  CHECK_THROWS_AS(confidence_intervals(f, 0.0), Error);
}

TEST_CASE("interval width shrinks with the grid") {
  Eigen::MatrixXd b(3, 3);
  b << 0.7, -0.7, 0.7, 0.7, 0.7, -0.7, -0.7, 0.7, 0.7;
  const Params truth(Eigen::VectorXd::Constant(3, -0.1), b);
  auto mean_se = [&](int n) {
    double s = 0.0;
    for (std::uint64_t rep = 0; rep < 4; ++rep) {
      const auto g = build_grid(n);
      s += fit(simulate(truth, g, {10, 10, 40 + rep}), g, full_mask(3)).se.mean();
    }
    return s / 4;
  };
  // Doubling n quadruples the tile count, halving the standard errors.
  const double ratio = mean_se(20) / mean_se(40);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("rank deficiency is reported with column names") {
  // Color 1 identically zero: its S column is all zero.
  auto y = testing::random_counts(3, 2, 16, 2.0, 6);
  for (int t = 0; t <= 3; ++t) {
    for (int i = 0; i < 16; ++i) y.at(t, 1, i) = 0;
  }
  try {
    fit(y, g4(), full_mask(2));
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rank_deficient);
    CHECK(std::string(e.what()).find("beta[0,1]") != std::string::npos);
  }

  // Constant counts make every S column collinear with the intercept.
  CountTensor flat(3, 1, 16);
  for (int t = 0; t <= 3; ++t) {
    for (int i = 0; i < 16; ++i) flat.at(t, 0, i) = 2;
  }
  try {
    fit(flat, g4(), full_mask(1));
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rank_deficient);
    CHECK(std::string(e.what()).find("collinear") != std::string::npos);
  }
}

TEST_CASE("non-convergence carries partial state") {
  const auto fx = testing::fixture_counts();
  FitOptions opts;
  opts.max_iter = 1;
  try {
    fit(fx, g4(), full_mask(2), opts);
    FAIL("expected non_convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.code() == ErrorCode::non_convergence);
    CHECK(e.partial().size() == 6);
    CHECK(e.iterations() == 1);
    CHECK(e.grad_norm() > 1e-8);
  }
}

TEST_CASE("fit rejects bad input") {
  const auto fx = testing::fixture_counts();
  CHECK_THROWS_AS(fit(fx, g4(), full_mask(3)), Error);
  CHECK_THROWS_AS(fit(fx, build_grid(3), full_mask(2)), Error);
  const std::vector<int> no_intercept{1, 2};
  CHECK_THROWS_AS(fit_color(make_design(fx, g4()), 0, no_intercept), Error);
}
