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

#include "mcg/mcg.h"

#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "mcg/io.hpp"
#include "mcg/parallel.hpp"
#include "mcg/simulate.hpp"

struct mcg_counts {
  mcg::GridCounts grid;
};

struct mcg_params {
  mcg::Params params;
};

struct mcg_fit {
  mcg::FitResult result;
  mcg::FitMeta meta;
};

namespace {

thread_local std::string g_last_error;

mcg_status to_status(mcg::ErrorCode code) {
  switch (code) {
    case mcg::ErrorCode::invalid_argument: return MCG_ERR_INVALID_ARGUMENT;
    case mcg::ErrorCode::parse_error: return MCG_ERR_PARSE;
    case mcg::ErrorCode::io_error: return MCG_ERR_IO;
    case mcg::ErrorCode::explosive_process: return MCG_ERR_EXPLOSIVE;
    case mcg::ErrorCode::non_convergence: return MCG_ERR_NONCONVERGENCE;
    case mcg::ErrorCode::rank_deficient: return MCG_ERR_RANK_DEFICIENT;
    case mcg::ErrorCode::singular_information: return MCG_ERR_SINGULAR;
    case mcg::ErrorCode::bootstrap_failed: return MCG_ERR_BOOTSTRAP;
  }
  return MCG_ERR_INTERNAL;
}

template <typename F>
mcg_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return MCG_OK;
  } catch (const mcg::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MCG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MCG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MCG_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw mcg::invalid_argument(std::string(what) + " must not be NULL");
}

mcg::Mask mask_from_ints(const int* mask, int k) {
  if (!mask) return mcg::full_mask(k);
  mcg::Mask m(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m(r, c) = mask[r * k + c] != 0;
  }
  return m;
}

mcg::FitMeta meta_for(const mcg_counts* counts) {
  mcg::FitMeta meta;
  meta.n = counts->grid.n;
  meta.colors = counts->grid.colors;
  return meta;
}

std::vector<std::string> default_labels(int k) {
  std::vector<std::string> labels;
  for (int c = 0; c < k; ++c) labels.push_back(std::to_string(c));
  return labels;
}

}  // namespace

extern "C" {

const char* mcg_version(void) { return mcg::kVersion; }

const char* mcg_status_name(mcg_status status) {
  switch (status) {
    case MCG_OK: return "ok";
    case MCG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MCG_ERR_PARSE: return "parse_error";
    case MCG_ERR_IO: return "io_error";
    case MCG_ERR_EXPLOSIVE: return "explosive_process";
    case MCG_ERR_NONCONVERGENCE: return "non_convergence";
    case MCG_ERR_RANK_DEFICIENT: return "rank_deficient";
    case MCG_ERR_SINGULAR: return "singular_information";
    case MCG_ERR_BOOTSTRAP: return "bootstrap_failed";
    case MCG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* mcg_last_error(void) { return g_last_error.c_str(); }

int mcg_default_threads(void) { return mcg::default_threads(); }

mcg_status mcg_counts_read_csv(const char* path, mcg_counts** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mcg_counts{mcg::read_counts_csv(std::string(path))};
  });
}

mcg_status mcg_counts_write_csv(const mcg_counts* counts, const char* path) {
  return guarded([&] {
    require(counts, "counts");
    require(path, "path");
    mcg::write_counts_csv(std::string(path), counts->grid);
  });
}

mcg_status mcg_counts_tile_cells(const char* cells_csv_path, int n, const double* bounds,
                                 mcg_counts** out) {
  return guarded([&] {
    require(cells_csv_path, "cells_csv_path");
    require(out, "out");
    const auto cells = mcg::read_cells_csv(std::string(cells_csv_path));
    std::optional<mcg::Bounds> b;
    if (bounds) b = mcg::Bounds{bounds[0], bounds[1], bounds[2], bounds[3]};
    *out = new mcg_counts{mcg::tile_cells(cells, n, b)};
  });
}

mcg_status mcg_counts_create(int n, int T, int n_colors, const int64_t* data, mcg_counts** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    if (n < 1) throw mcg::invalid_argument("grid side must be >= 1");
    mcg::GridCounts g;
    g.n = n;
    g.counts = mcg::CountTensor(T, n_colors, n * n);
    g.colors = default_labels(n_colors);
    for (int t = 0; t <= T; ++t) {
      auto slice = g.counts.slice(t);
      for (std::size_t j = 0; j < slice.size(); ++j) {
        const int64_t v = data[static_cast<std::size_t>(t) * slice.size() + j];
        if (v < 0) throw mcg::invalid_argument("counts must be nonnegative");
        slice[j] = v;
      }
    }
    *out = new mcg_counts{std::move(g)};
  });
}

void mcg_counts_free(mcg_counts* counts) { delete counts; }

int mcg_counts_side(const mcg_counts* counts) { return counts ? counts->grid.n : 0; }
int mcg_counts_T(const mcg_counts* counts) { return counts ? counts->grid.counts.T() : 0; }
int mcg_counts_n_colors(const mcg_counts* counts) {
  return counts ? counts->grid.counts.n_colors() : 0;
}

int64_t mcg_counts_get(const mcg_counts* counts, int t, int color, int row, int col) {
  if (!counts) return -1;
  const auto& g = counts->grid;
  if (t < 0 || t > g.counts.T() || color < 0 || color >= g.counts.n_colors() || row < 0 ||
      row >= g.n || col < 0 || col >= g.n) {
    return -1;
  }
  return g.counts.at(t, color, row * g.n + col);
}

mcg_status mcg_params_read_json(const char* path, mcg_params** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mcg_params{mcg::read_params_json(std::string(path))};
  });
}

mcg_status mcg_params_create(int n_colors, const double* alpha, const double* beta,
                             const int* mask, mcg_params** out) {
  return guarded([&] {
    require(alpha, "alpha");
    require(beta, "beta");
    require(out, "out");
    if (n_colors < 1) throw mcg::invalid_argument("n_colors must be >= 1");
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(alpha, n_colors);
    Eigen::MatrixXd b(n_colors, n_colors);
    for (int r = 0; r < n_colors; ++r) {
      for (int c = 0; c < n_colors; ++c) b(r, c) = beta[r * n_colors + c];
    }
    *out = new mcg_params{mcg::Params(a, b, mask_from_ints(mask, n_colors))};
  });
}

void mcg_params_free(mcg_params* params) { delete params; }

mcg_status mcg_simulate(const mcg_params* params, int n, int T, int64_t seed_count, uint64_t rng,
                        mcg_counts** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    const auto geom = mcg::build_grid(n);
    mcg::GridCounts g;
    g.n = n;
    g.counts = mcg::simulate(params->params, geom, {seed_count, T, rng});
    g.colors = default_labels(params->params.n_colors());
    *out = new mcg_counts{std::move(g)};
  });
}

mcg_status mcg_mask_read_json(const char* path, int* mask_out, size_t capacity,
                              int* n_colors_out) {
  return guarded([&] {
    require(path, "path");
    require(mask_out, "mask_out");
    const auto m = mcg::read_mask_json(std::string(path));
    const auto k = static_cast<std::size_t>(m.rows());
    if (k * k > capacity) throw mcg::invalid_argument("mask buffer too small");
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) mask_out[r * k + c] = m(r, c) ? 1 : 0;
    }
    if (n_colors_out) *n_colors_out = static_cast<int>(k);
  });
}

mcg_status mcg_fit_counts(const mcg_counts* counts, const int* mask, mcg_fit** out) {
  return guarded([&] {
    require(counts, "counts");
    require(out, "out");
    const auto& g = counts->grid;
    const auto geom = mcg::build_grid(g.n);
    auto result = mcg::fit(g.counts, geom, mask_from_ints(mask, g.counts.n_colors()));
    *out = new mcg_fit{std::move(result), meta_for(counts)};
  });
}

mcg_status mcg_select(const mcg_counts* counts, mcg_criterion criterion, mcg_fit** out) {
  return guarded([&] {
    require(counts, "counts");
    require(out, "out");
    const auto& g = counts->grid;
    const auto geom = mcg::build_grid(g.n);
    const auto crit = criterion == MCG_AIC ? mcg::Criterion::aic : mcg::Criterion::bic;
    auto [selection, result] = mcg::select(g.counts, geom, crit);
    auto meta = meta_for(counts);
    meta.criterion = crit;
    meta.selection = std::move(selection);
    *out = new mcg_fit{std::move(result), std::move(meta)};
  });
}

mcg_status mcg_fit_load_json(const char* path, const mcg_counts* counts, mcg_fit** out) {
  return guarded([&] {
    require(path, "path");
    require(counts, "counts");
    require(out, "out");
    const auto doc = mcg::read_json(std::string(path));
    mcg::Mask mask;
    std::vector<double> estimates;
    try {
      mask = mcg::mask_from_json(doc.at("mask"));
      for (const auto& p : doc.at("parameters")) estimates.push_back(p.at("estimate").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw mcg::Error(mcg::ErrorCode::parse_error, std::string(path) + ": " + e.what());
    }
    const auto& g = counts->grid;
    const auto geom = mcg::build_grid(g.n);
    auto result = mcg::fit(g.counts, geom, mask);
    const Eigen::VectorXd theta = result.params_hat.free_vector();
    if (static_cast<std::size_t>(theta.size()) != estimates.size()) {
      throw mcg::invalid_argument("fit document does not match the counts (parameter count)");
    }
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      if (std::fabs(theta[j] - estimates[j]) > 1e-6 * std::max(1.0, std::fabs(theta[j]))) {
        throw mcg::invalid_argument("fit document does not match the counts (estimate " +
                                    std::to_string(j) + ")");
      }
    }
    *out = new mcg_fit{std::move(result), meta_for(counts)};
  });
}

mcg_status mcg_fit_write_json(const mcg_fit* fit, double ci_level, const char* path) {
  return guarded([&] {
    require(fit, "fit");
    require(path, "path");
    auto meta = fit->meta;
    meta.ci_level = ci_level;
    mcg::write_json(std::string(path), mcg::fit_to_json(fit->result, meta));
  });
}

void mcg_fit_free(mcg_fit* fit) { delete fit; }

int mcg_fit_num_params(const mcg_fit* fit) { return fit ? fit->result.n_free() : 0; }

mcg_status mcg_fit_estimates(const mcg_fit* fit, double* theta, double* se, size_t len) {
  return guarded([&] {
    require(fit, "fit");
    const auto p = static_cast<std::size_t>(fit->result.n_free());
    if (len < p) throw mcg::invalid_argument("buffer shorter than the parameter count");
    const Eigen::VectorXd v = fit->result.params_hat.free_vector();
    for (std::size_t j = 0; j < p; ++j) {
      if (theta) theta[j] = v[j];
      if (se) se[j] = fit->result.se[j];
    }
  });
}

double mcg_fit_loglik(const mcg_fit* fit) { return fit ? fit->result.loglik : NAN; }
double mcg_fit_aic(const mcg_fit* fit) { return fit ? fit->result.aic : NAN; }
double mcg_fit_bic(const mcg_fit* fit) { return fit ? fit->result.bic : NAN; }

mcg_status mcg_bootstrap_write_json(const mcg_fit* fit, const mcg_counts* counts, int B,
                                    uint64_t rng, double ci_level, const char* path) {
  return guarded([&] {
    require(fit, "fit");
    require(counts, "counts");
    require(path, "path");
    const auto& g = counts->grid;
    const auto geom = mcg::build_grid(g.n);
    const auto boot =
        mcg::parametric_bootstrap(fit->result, g.counts.slice(0), geom, g.counts.T(), B, rng);
    mcg::write_json(std::string(path), mcg::bootstrap_to_json(fit->result, boot, ci_level, rng));
  });
}

mcg_status mcg_predict_qq_csv(const mcg_counts* counts, int window, const int* times,
                              size_t n_times, double qq_offset, uint64_t rng, const int* mask,
                              const char* path, int* all_covered) {
  return guarded([&] {
    require(counts, "counts");
    require(times, "times");
    require(path, "path");
    const auto& g = counts->grid;
    const auto geom = mcg::build_grid(g.n);
    const auto m = mask_from_ints(mask, g.counts.n_colors());
    std::vector<mcg::QQRow> rows;
    bool covered = true;
    for (std::size_t k = 0; k < n_times; ++k) {
      const int t = times[k];
      if (t > g.counts.T()) {
        throw mcg::invalid_argument("predict: t=" + std::to_string(t) +
                                    " has no observed slice to compare against");
      }
      const auto fc = mcg::onestep_forecast(g.counts, geom, t, window, m, rng + k);
      for (int c = 0; c < g.counts.n_colors(); ++c) {
        const auto pred = std::span<const std::int64_t>(fc.sampled)
                              .subspan(static_cast<std::size_t>(c) * g.counts.n_tiles(),
                                       g.counts.n_tiles());
        auto band = mcg::qq_band(g.counts.slice(t, c), pred, qq_offset);
        covered = covered && band.covered;
        rows.push_back({t, c, std::move(band)});
      }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mcg::Error(mcg::ErrorCode::io_error, std::string("cannot open '") + path + "'");
    mcg::write_qq_csv(out, rows, g.colors);
    if (all_covered) *all_covered = covered ? 1 : 0;
  });
}

mcg_status mcg_gof_replicate(const mcg_fit* fit, const mcg_counts* counts, uint64_t rng,
                             mcg_counts** out) {
  return guarded([&] {
    require(fit, "fit");
    require(counts, "counts");
    require(out, "out");
    const auto& g = counts->grid;
    const auto geom = mcg::build_grid(g.n);
    mcg::GridCounts rep;
    rep.n = g.n;
    rep.colors = g.colors;
    rep.counts = mcg::replicate_fit(g.counts, geom, fit->result, rng);
    *out = new mcg_counts{std::move(rep)};
  });
}

void mcg_mc_options_init(mcg_mc_options* options) {
  if (!options) return;
  options->table = 1;
  options->model = 1;
  options->n = 25;
  options->T = 10;
  options->reps = 200;
  options->rng = 1;
  options->seed_count = mcg::kStudySeedCount;
  options->bootstrap_B = 0;
  options->threads = 0;
}

mcg_status mcg_montecarlo_write_json(const mcg_mc_options* options, const char* path) {
  return guarded([&] {
    require(options, "options");
    require(path, "path");
    mcg::MCDesign d;
    d.model_id = options->model;
    d.n = options->n;
    d.T = options->T;
    d.n_replicates = options->reps;
    d.rng_seed = options->rng;
    d.seed_count = options->seed_count;
    d.bootstrap_B = options->bootstrap_B;
    d.threads = options->threads;
    const auto report = mcg::run_table(options->table, d);
    mcg::write_json(std::string(path), mcg::report_to_json(report));
  });
}

}  // extern "C"
