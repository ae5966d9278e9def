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

// Command-line front end. Everything goes through the C interface in mcg.h.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcg/mcg.h"

namespace {

struct Failure {
  mcg_status status;
  std::string message;
};

void check(mcg_status status) {
  if (status != MCG_OK) throw Failure{status, mcg_last_error()};
}

struct CountsDeleter {
  void operator()(mcg_counts* p) const { mcg_counts_free(p); }
};
struct ParamsDeleter {
  void operator()(mcg_params* p) const { mcg_params_free(p); }
};
struct FitDeleter {
  void operator()(mcg_fit* p) const { mcg_fit_free(p); }
};
using CountsPtr = std::unique_ptr<mcg_counts, CountsDeleter>;
using ParamsPtr = std::unique_ptr<mcg_params, ParamsDeleter>;
using FitPtr = std::unique_ptr<mcg_fit, FitDeleter>;

CountsPtr load_counts(const std::string& path) {
  mcg_counts* raw = nullptr;
  check(mcg_counts_read_csv(path.c_str(), &raw));
  return CountsPtr(raw);
}

std::vector<int> load_mask(const std::string& path) {
  std::vector<int> mask(64 * 64);
  int k = 0;
  check(mcg_mask_read_json(path.c_str(), mask.data(), mask.size(), &k));
  mask.resize(static_cast<std::size_t>(k) * k);
  return mask;
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Failure{MCG_ERR_INVALID_ARGUMENT, "--ci must be in (0, 1)"};
  }
}

void report(const Failure& f) {
  const nlohmann::json line{{"error", mcg_status_name(f.status)},
                            {"status", static_cast<int>(f.status)},
                            {"message", f.message}};
  std::cerr << line.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial autoregressive Poisson model for multicolor cell counts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mcg_version()));

  // tile
  auto* tile = app.add_subcommand("tile", "Bin cell coordinates into grid counts");
  std::string cells_path, out_path;
  int n = 25;
  std::vector<double> bounds;
  tile->add_option("--cells", cells_path, "CSV with columns t,x,y,color")->required();
  tile->add_option("--n", n, "Grid side")->required();
  tile->add_option("--bounds", bounds, "x_min,x_max,y_min,y_max (default: bounding box)")
      ->delimiter(',')
      ->expected(4);
  tile->add_option("--out", out_path, "Counts CSV")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate counts from a parameter file");
  std::string params_path;
  int T = 10;
  std::int64_t seed_count = 1;
  std::uint64_t rng = 42;
  sim->add_option("--params", params_path, "Parameter JSON (alpha, beta, optional mask)")->required();
  sim->add_option("--n", n, "Grid side")->required();
  sim->add_option("--T", T, "Number of transitions")->required();
  sim->add_option("--seed-count", seed_count, "Count per tile and color at t=0");
  sim->add_option("--rng", rng, "RNG seed");
  sim->add_option("--out", out_path, "Counts CSV")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "Maximum likelihood fit");
  std::string counts_path, mask_path;
  double ci = 0.95;
  fitc->add_option("--counts", counts_path)->required();
  fitc->add_option("--mask", mask_path, "Mask JSON");
  fitc->add_option("--ci", ci, "Confidence level");
  fitc->add_option("--out", out_path, "Fit JSON")->required();

  // select
  auto* selc = app.add_subcommand("select", "AIC/BIC subset selection of interaction terms");
  std::string criterion = "bic";
  selc->add_option("--counts", counts_path)->required();
  selc->add_option("--criterion", criterion)->check(CLI::IsMember({"aic", "bic"}));
  selc->add_option("--ci", ci, "Confidence level");
  selc->add_option("--out", out_path, "Fit JSON")->required();

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "Parametric bootstrap standard errors");
  std::string fit_path;
  int B = 50;
  std::uint64_t boot_rng = 7;
  boot->add_option("--counts", counts_path)->required();
  boot->add_option("--fit", fit_path, "Fit JSON produced by fit or select")->required();
  boot->add_option("-B", B, "Bootstrap replicates");
  boot->add_option("--rng", boot_rng, "RNG seed");
  boot->add_option("--ci", ci, "Confidence level");
  boot->add_option("--out", out_path, "Bootstrap JSON")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "One-step-ahead forecasts and QQ bands");
  int window = 5;
  std::vector<int> times{6, 7, 8};
  double qq_offset = 0.95;
  std::uint64_t pred_rng = 11;
  pred->add_option("--counts", counts_path)->required();
  pred->add_option("--window", window, "Moving window length");
  pred->add_option("--t", times, "Times to predict")->delimiter(',');
  pred->add_option("--qq-offset", qq_offset, "Probability offset of the band");
  pred->add_option("--mask", mask_path, "Mask JSON");
  pred->add_option("--rng", pred_rng, "RNG seed");
  pred->add_option("--out", out_path, "QQ table CSV")->required();

  // gof
  auto* gof = app.add_subcommand("gof", "Goodness-of-fit replicate from the fitted model");
  std::uint64_t gof_rng = 13;
  gof->add_option("--counts", counts_path)->required();
  gof->add_option("--fit", fit_path)->required();
  gof->add_option("--rng", gof_rng, "RNG seed");
  gof->add_option("--out", out_path, "Replicate counts CSV")->required();

  // canon
  auto* canon = app.add_subcommand("canon", "Rewrite a counts file in canonical form");
  canon->add_option("--counts", counts_path)->required();
  canon->add_option("--out", out_path)->required();

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "Simulation study tables");
  mcg_mc_options mco;
  mcg_mc_options_init(&mco);
  mc->add_option("--table", mco.table)->check(CLI::Range(1, 3))->required();
  mc->add_option("--model", mco.model)->check(CLI::Range(1, 3));
  mc->add_option("--n", mco.n, "Grid side");
  mc->add_option("--T", mco.T, "Number of transitions");
  mc->add_option("--reps", mco.reps, "Monte Carlo replicates");
  mc->add_option("--rng", mco.rng, "RNG seed");
  mc->add_option("--seed-count", mco.seed_count, "Count per tile and color at t=0");
  mc->add_option("--boot-B", mco.bootstrap_B, "Bootstrap replicates per run (table 2)");
  mc->add_option("--out", out_path, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report({MCG_ERR_INVALID_ARGUMENT, e.what()});
    return MCG_ERR_INVALID_ARGUMENT;
  }

  try {
    if (*tile) {
      mcg_counts* raw = nullptr;
      check(mcg_counts_tile_cells(cells_path.c_str(), n, bounds.empty() ? nullptr : bounds.data(),
                                  &raw));
      CountsPtr counts(raw);
      check(mcg_counts_write_csv(counts.get(), out_path.c_str()));
    } else if (*sim) {
      mcg_params* praw = nullptr;
      check(mcg_params_read_json(params_path.c_str(), &praw));
      ParamsPtr params(praw);
      mcg_counts* raw = nullptr;
      check(mcg_simulate(params.get(), n, T, seed_count, rng, &raw));
      CountsPtr counts(raw);
      check(mcg_counts_write_csv(counts.get(), out_path.c_str()));
    } else if (*fitc) {
      check_level(ci);
      auto counts = load_counts(counts_path);
      std::optional<std::vector<int>> mask;
      if (!mask_path.empty()) mask = load_mask(mask_path);
      mcg_fit* raw = nullptr;
      check(mcg_fit_counts(counts.get(), mask ? mask->data() : nullptr, &raw));
      FitPtr f(raw);
      check(mcg_fit_write_json(f.get(), ci, out_path.c_str()));
    } else if (*selc) {
      check_level(ci);
      auto counts = load_counts(counts_path);
      mcg_fit* raw = nullptr;
      check(mcg_select(counts.get(), criterion == "aic" ? MCG_AIC : MCG_BIC, &raw));
      FitPtr f(raw);
      check(mcg_fit_write_json(f.get(), ci, out_path.c_str()));
    } else if (*boot) {
      check_level(ci);
      auto counts = load_counts(counts_path);
      mcg_fit* raw = nullptr;
      check(mcg_fit_load_json(fit_path.c_str(), counts.get(), &raw));
      FitPtr f(raw);
      check(mcg_bootstrap_write_json(f.get(), counts.get(), B, boot_rng, ci, out_path.c_str()));
    } else if (*pred) {
      auto counts = load_counts(counts_path);
      std::optional<std::vector<int>> mask;
      if (!mask_path.empty()) mask = load_mask(mask_path);
      int covered = 0;
      check(mcg_predict_qq_csv(counts.get(), window, times.data(), times.size(), qq_offset,
                               pred_rng, mask ? mask->data() : nullptr, out_path.c_str(),
                               &covered));
      std::cout << "identity line inside every band: " << (covered ? "yes" : "no") << '\n';
    } else if (*gof) {
      auto counts = load_counts(counts_path);
      mcg_fit* raw = nullptr;
      check(mcg_fit_load_json(fit_path.c_str(), counts.get(), &raw));
      FitPtr f(raw);
      mcg_counts* rep = nullptr;
      check(mcg_gof_replicate(f.get(), counts.get(), gof_rng, &rep));
      CountsPtr replicate(rep);
      check(mcg_counts_write_csv(replicate.get(), out_path.c_str()));
    } else if (*canon) {
      auto counts = load_counts(counts_path);
      check(mcg_counts_write_csv(counts.get(), out_path.c_str()));
    } else if (*mc) {
      check(mcg_montecarlo_write_json(&mco, out_path.c_str()));
    }
  } catch (const Failure& f) {
    report(f);
    return static_cast<int>(f.status);
  }
  return 0;
}
