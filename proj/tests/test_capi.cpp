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

// Exercises the shared library through mcg.h only.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "mcg/mcg.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mcg_capi_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(mcg_version()) == "0.3.0");
  CHECK(std::string(mcg_status_name(MCG_OK)) == "ok");
  CHECK(std::string(mcg_status_name(MCG_ERR_RANK_DEFICIENT)) == "rank_deficient");
  CHECK(mcg_default_threads() >= 1);
}

TEST_CASE("create, query and free counts") {
  std::vector<int64_t> data(2 * 1 * 4, 0);
  data[4 + 3] = 7;  // t=1, color 0, row 1, col 1
  mcg_counts* c = nullptr;
  REQUIRE(mcg_counts_create(2, 1, 1, data.data(), &c) == MCG_OK);
  CHECK(mcg_counts_side(c) == 2);
  CHECK(mcg_counts_T(c) == 1);
  CHECK(mcg_counts_n_colors(c) == 1);
  CHECK(mcg_counts_get(c, 1, 0, 1, 1) == 7);
  CHECK(mcg_counts_get(c, 5, 0, 1, 1) == -1);
  mcg_counts_free(c);

  data[0] = -1;
  CHECK(mcg_counts_create(2, 1, 1, data.data(), &c) == MCG_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(mcg_last_error()) > 0);
  CHECK(mcg_counts_create(2, 1, 1, nullptr, &c) == MCG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("simulate, fit, select through the C interface") {
  const double alpha[] = {-0.1, -0.1, -0.1};
  const double beta[] = {0.7, -0.7, 0.7, 0, 0.7, 0, 0, 0, 0.7};
  const int mask[] = {1, 1, 1, 0, 1, 0, 0, 0, 1};
  mcg_params* p = nullptr;
  REQUIRE(mcg_params_create(3, alpha, beta, mask, &p) == MCG_OK);
  mcg_counts* y = nullptr;
  REQUIRE(mcg_simulate(p, 20, 6, 10, 5, &y) == MCG_OK);

  mcg_fit* full = nullptr;
  REQUIRE(mcg_fit_counts(y, nullptr, &full) == MCG_OK);
  CHECK(mcg_fit_num_params(full) == 12);
  std::vector<double> theta(12), se(12);
  REQUIRE(mcg_fit_estimates(full, theta.data(), se.data(), theta.size()) == MCG_OK);
  CHECK(theta[1] > 0.4);
  CHECK(mcg_fit_estimates(full, theta.data(), se.data(), 3) == MCG_ERR_INVALID_ARGUMENT);
  CHECK(mcg_fit_aic(full) == doctest::Approx(-2 * mcg_fit_loglik(full) + 24));

  mcg_fit* sparse = nullptr;
  REQUIRE(mcg_fit_counts(y, mask, &sparse) == MCG_OK);
  CHECK(mcg_fit_num_params(sparse) == 8);

  mcg_fit* sel = nullptr;
  REQUIRE(mcg_select(y, MCG_BIC, &sel) == MCG_OK);
  CHECK(mcg_fit_bic(sel) <= mcg_fit_bic(full) + 1e-9);

  const auto path = scratch("fit.json");
  REQUIRE(mcg_fit_write_json(sel, 0.95, path.string().c_str()) == MCG_OK);
  mcg_fit* loaded = nullptr;
  REQUIRE(mcg_fit_load_json(path.string().c_str(), y, &loaded) == MCG_OK);
  CHECK(mcg_fit_loglik(loaded) == mcg_fit_loglik(sel));
  CHECK(mcg_fit_write_json(sel, 1.5, path.string().c_str()) == MCG_ERR_INVALID_ARGUMENT);

  const auto boot = scratch("boot.json");
  CHECK(mcg_bootstrap_write_json(loaded, y, 5, 1, 0.95, boot.string().c_str()) == MCG_OK);
  CHECK(slurp(boot).find("\"se_boot\"") != std::string::npos);

  mcg_counts* rep = nullptr;
  REQUIRE(mcg_gof_replicate(loaded, y, 3, &rep) == MCG_OK);
  CHECK(mcg_counts_get(rep, 0, 1, 4, 4) == 10);

  const int times[] = {6};
  int covered = -1;
  const auto qq = scratch("qq.csv");
  CHECK(mcg_predict_qq_csv(y, 5, times, 1, 0.95, 1, nullptr, qq.string().c_str(), &covered) == MCG_OK);
  CHECK((covered == 0 || covered == 1));
  CHECK(mcg_predict_qq_csv(y, 5, times, 1, 0.95, 1, nullptr, nullptr, &covered) == MCG_ERR_INVALID_ARGUMENT);
  const int late[] = {7};
  CHECK(mcg_predict_qq_csv(y, 5, late, 1, 0.95, 1, nullptr, qq.string().c_str(), &covered) == MCG_ERR_INVALID_ARGUMENT);

  mcg_counts_free(rep);
  mcg_fit_free(loaded);
  mcg_fit_free(sel);
  mcg_fit_free(sparse);
  mcg_fit_free(full);
  mcg_counts_free(y);
  mcg_params_free(p);
}

TEST_CASE("error codes map library failures") {
  mcg_counts* c = nullptr;
  CHECK(mcg_counts_read_csv("/nonexistent/counts.csv", &c) == MCG_ERR_IO);
  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "t,row,col,color,count\n0,0,0,0,x\n";
  CHECK(mcg_counts_read_csv(bad.string().c_str(), &c) == MCG_ERR_PARSE);
  CHECK(std::string(mcg_last_error()).find(":2") != std::string::npos);

  std::vector<int64_t> zeros(4 * 2 * 9, 0);
  for (int t = 0; t < 4; ++t) {
    for (int i = 0; i < 9; ++i) zeros[(t * 2) * 9 + i] = (t + i) % 3;
  }
  REQUIRE(mcg_counts_create(3, 3, 2, zeros.data(), &c) == MCG_OK);
  mcg_fit* f = nullptr;
  CHECK(mcg_fit_counts(c, nullptr, &f) == MCG_ERR_RANK_DEFICIENT);
  CHECK(f == nullptr);
  mcg_counts_free(c);

  const double alpha[] = {800.0};
  const double beta[] = {0.0};
  mcg_params* p = nullptr;
  REQUIRE(mcg_params_create(1, alpha, beta, nullptr, &p) == MCG_OK);
  CHECK(mcg_simulate(p, 3, 2, 1, 1, &c) == MCG_ERR_EXPLOSIVE);
  mcg_params_free(p);
}

TEST_CASE("counts files round trip byte for byte") {
  const double alpha[] = {-0.1, -0.1};
  const double beta[] = {0.5, -0.2, 0.1, 0.4};
  mcg_params* p = nullptr;
  REQUIRE(mcg_params_create(2, alpha, beta, nullptr, &p) == MCG_OK);
  mcg_counts* y = nullptr;
  REQUIRE(mcg_simulate(p, 8, 4, 1, 42, &y) == MCG_OK);
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  REQUIRE(mcg_counts_write_csv(y, a.string().c_str()) == MCG_OK);
  mcg_counts* back = nullptr;
  REQUIRE(mcg_counts_read_csv(a.string().c_str(), &back) == MCG_OK);
  REQUIRE(mcg_counts_write_csv(back, b.string().c_str()) == MCG_OK);
  CHECK(slurp(a) == slurp(b));
  mcg_counts_free(back);
  mcg_counts_free(y);
  mcg_params_free(p);
}

TEST_CASE("monte carlo options") {
  mcg_mc_options o;
  mcg_mc_options_init(&o);
  CHECK(o.n == 25);
  CHECK(o.T == 10);
  CHECK(o.reps == 200);
  CHECK(o.seed_count == 10);
  o.n = 8;
  o.T = 3;
  o.reps = 4;
  const auto out = scratch("mc.json");
  CHECK(mcg_montecarlo_write_json(&o, out.string().c_str()) == MCG_OK);
  CHECK(slurp(out).find("\"variance_e4\"") != std::string::npos);
  o.table = 9;
  CHECK(mcg_montecarlo_write_json(&o, out.string().c_str()) == MCG_ERR_INVALID_ARGUMENT);
}
