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

#include "mcg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

namespace mcg {

namespace {

using nlohmann::json;

Error parse_error(const std::string& where, int line, const std::string& what) {
  return Error(ErrorCode::parse_error, where + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is unavailable on some toolchains; strtod is fine
    // for validated, null-terminated copies.
    std::string copy(s);
    char* end = nullptr;
    out = std::strtod(copy.c_str(), &end);
    return end == copy.c_str() + copy.size() && std::isfinite(out);
  } else {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  }
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json mask_json(const Mask& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(static_cast<bool>(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(v[j]);
  return out;
}

void check_label(const std::string& label) {
  if (label.empty() || label.find_first_of(",; \t\r\n=") != std::string::npos) {
    throw invalid_argument("color label '" + label +
                           "' must be nonempty without commas, semicolons, '=' or whitespace");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Cells

CellTable read_cells_csv(std::istream& in, const std::string& where) {
  std::string line;
  int line_no = 0;
  int col_t = -1, col_x = -1, col_y = -1, col_color = -1;
  std::size_t n_cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body, ',');
    n_cols = fields.size();
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const auto name = trim(fields[k]);
      if (name == "t") col_t = static_cast<int>(k);
      else if (name == "x") col_x = static_cast<int>(k);
      else if (name == "y") col_y = static_cast<int>(k);
      else if (name == "color") col_color = static_cast<int>(k);
    }
    if (col_t < 0 || col_x < 0 || col_y < 0 || col_color < 0) {
      throw parse_error(where, line_no, "header must name columns t, x, y, color");
    }
    break;
  }
  if (n_cols == 0) throw parse_error(where, line_no, "missing header");

  CellTable table;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body, ',');
    if (fields.size() != n_cols) {
      throw parse_error(where, line_no, "expected " + std::to_string(n_cols) + " fields, got " +
                                            std::to_string(fields.size()));
    }
    CellRow row;
    if (!parse_number(fields[col_t], row.t)) throw parse_error(where, line_no, "bad time label");
    if (!parse_number(fields[col_x], row.x)) throw parse_error(where, line_no, "bad x coordinate");
    if (!parse_number(fields[col_y], row.y)) throw parse_error(where, line_no, "bad y coordinate");
    row.color = std::string(trim(fields[col_color]));
    if (row.color.empty()) throw parse_error(where, line_no, "empty color label");
    if (row.color.find_first_of(",; \t=") != std::string::npos) {
      throw parse_error(where, line_no, "color label '" + row.color + "' has a separator or whitespace");
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(line_no);
  }
  return table;
}

CellTable read_cells_csv(const std::string& path) {
  auto in = open_in(path);
  return read_cells_csv(in, path);
}

Bounds bounding_box(const CellTable& cells) {
  if (cells.rows.empty()) throw invalid_argument("tile: no cells");
  Bounds b{cells.rows[0].x, cells.rows[0].x, cells.rows[0].y, cells.rows[0].y};
  for (const auto& r : cells.rows) {
    b.x_min = std::min(b.x_min, r.x);
    b.x_max = std::max(b.x_max, r.x);
    b.y_min = std::min(b.y_min, r.y);
    b.y_max = std::max(b.y_max, r.y);
  }
  return b;
}

GridCounts tile_cells(const CellTable& cells, int n, const std::optional<Bounds>& bounds) {
  if (n < 1) throw invalid_argument("tile: grid side must be >= 1");
  if (cells.rows.empty()) throw invalid_argument("tile: no cells");
  const Bounds b = bounds ? *bounds : bounding_box(cells);
  if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min)) {
    throw invalid_argument("tile: degenerate bounds");
  }

  std::vector<int> outside;
  for (std::size_t k = 0; k < cells.rows.size(); ++k) {
    const auto& r = cells.rows[k];
    if (r.x < b.x_min || r.x > b.x_max || r.y < b.y_min || r.y > b.y_max) {
      outside.push_back(k < cells.lines.size() ? cells.lines[k] : static_cast<int>(k) + 1);
    }
  }
  if (!outside.empty()) {
    std::string msg = "tile: " + std::to_string(outside.size()) + " cell(s) outside bounds (";
    msg += outside.size() > 1 ? "lines" : "line";
    for (std::size_t k = 0; k < outside.size() && k < 20; ++k) msg += " " + std::to_string(outside[k]);
    if (outside.size() > 20) msg += " ...";
    throw invalid_argument(msg + ")");
  }

  std::set<int> times;
  for (const auto& r : cells.rows) times.insert(r.t);
  int expect = 0;
  for (int t : times) {
    if (t != expect) {
      throw invalid_argument("tile: time labels must be contiguous from 0; missing t=" +
                             std::to_string(expect));
    }
    ++expect;
  }
  const int T = *times.rbegin();

  GridCounts out;
  out.n = n;
  std::map<std::string, int> color_index;
  for (const auto& r : cells.rows) {
    if (color_index.emplace(r.color, static_cast<int>(out.colors.size())).second) {
      check_label(r.color);
      out.colors.push_back(r.color);
    }
  }
  out.counts = CountTensor(T, static_cast<int>(out.colors.size()), n * n);
  const auto bin = [n](double v, double lo, double hi) {
    const int k = static_cast<int>(std::floor(n * (v - lo) / (hi - lo)));
    return std::clamp(k, 0, n - 1);
  };
  for (const auto& r : cells.rows) {
    const int row = bin(r.y, b.y_min, b.y_max);
    const int col = bin(r.x, b.x_min, b.x_max);
    out.counts.at(r.t, color_index.at(r.color), row * n + col) += 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counts

void write_counts_csv(std::ostream& out, const GridCounts& g) {
  const auto& y = g.counts;
  if (g.n * g.n != y.n_tiles()) throw invalid_argument("counts: grid side does not match tiles");
  if (static_cast<int>(g.colors.size()) != y.n_colors()) {
    throw invalid_argument("counts: color labels do not match tensor");
  }
  out << "# mcg-counts n=" << g.n << " T=" << y.T() << " colors=";
  for (std::size_t c = 0; c < g.colors.size(); ++c) {
    check_label(g.colors[c]);
    out << (c ? ";" : "") << g.colors[c];
  }
  out << "\n" << "t,row,col,color,count\n";
  for (int t = 0; t <= y.T(); ++t) {
    for (int c = 0; c < y.n_colors(); ++c) {
      for (int i = 0; i < y.n_tiles(); ++i) {
        const auto v = y.at(t, c, i);
        if (v == 0) continue;
        out << t << ',' << i / g.n << ',' << i % g.n << ',' << c << ',' << v << '\n';
      }
    }
  }
}

void write_counts_csv(const std::string& path, const GridCounts& counts) {
  auto out = open_out(path);
  write_counts_csv(out, counts);
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

GridCounts read_counts_csv(std::istream& in, const std::string& where) {
  struct Entry {
    int t, row, col, color;
    std::int64_t count;
    int line;
  };
  std::vector<Entry> entries;
  std::optional<int> meta_n, meta_T;
  std::optional<std::vector<std::string>> meta_colors;
  bool header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (header || body.find("mcg-counts") == std::string_view::npos) continue;
      std::istringstream meta{std::string(body.substr(1))};
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        int v = 0;
        if (key == "n" || key == "T") {
          if (!parse_number(value, v) || v < (key == "n" ? 1 : 0)) {
            throw parse_error(where, line_no, "bad metadata " + token);
          }
          (key == "n" ? meta_n : meta_T) = v;
        } else if (key == "colors") {
          std::vector<std::string> labels;
          for (auto part : split(value, ';')) labels.emplace_back(part);
          meta_colors = std::move(labels);
        }
      }
      continue;
    }
    if (!header) {
      if (body != "t,row,col,color,count") {
        throw parse_error(where, line_no, "expected header 't,row,col,color,count'");
      }
      header = true;
      continue;
    }
    const auto f = split(body, ',');
    if (f.size() != 5) throw parse_error(where, line_no, "expected 5 fields");
    Entry e{0, 0, 0, 0, 0, line_no};
    if (!parse_number(f[0], e.t) || e.t < 0) throw parse_error(where, line_no, "bad t");
    if (!parse_number(f[1], e.row) || e.row < 0) throw parse_error(where, line_no, "bad row");
    if (!parse_number(f[2], e.col) || e.col < 0) throw parse_error(where, line_no, "bad col");
    if (!parse_number(f[3], e.color) || e.color < 0) throw parse_error(where, line_no, "bad color");
    if (!parse_number(f[4], e.count) || e.count < 0) throw parse_error(where, line_no, "bad count");
    entries.push_back(e);
  }
  if (!header) throw parse_error(where, line_no, "missing header");

  int n = meta_n.value_or(0), T = meta_T.value_or(0);
  int k = meta_colors ? static_cast<int>(meta_colors->size()) : 0;
  for (const auto& e : entries) {
    if (!meta_n) n = std::max(n, std::max(e.row, e.col) + 1);
    if (!meta_T) T = std::max(T, e.t);
    if (!meta_colors) k = std::max(k, e.color + 1);
  }
  if (n < 1 || k < 1) throw parse_error(where, line_no, "cannot determine grid size or colors");

  GridCounts g;
  g.n = n;
  if (meta_colors) {
    g.colors = *meta_colors;
  } else {
    for (int c = 0; c < k; ++c) g.colors.push_back(std::to_string(c));
  }
  g.counts = CountTensor(T, k, n * n);
  std::vector<char> seen(g.counts.raw().size(), 0);
  for (const auto& e : entries) {
    if (e.t > T || e.row >= n || e.col >= n || e.color >= k) {
      throw parse_error(where, e.line, "index outside the declared dimensions");
    }
    const std::size_t flat =
        (static_cast<std::size_t>(e.t) * k + e.color) * (n * n) + e.row * n + e.col;
    if (seen[flat]) throw parse_error(where, e.line, "duplicate entry");
    seen[flat] = 1;
    g.counts.at(e.t, e.color, e.row * n + e.col) = e.count;
  }
  return g;
}

GridCounts read_counts_csv(const std::string& path) {
  auto in = open_in(path);
  return read_counts_csv(in, path);
}

// ---------------------------------------------------------------------------
// JSON documents

void write_json(const std::string& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

Mask mask_from_json(const json& doc) {
  const json& rows = doc.is_object() ? doc.at("mask") : doc;
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::parse_error, "mask: expected a nested array");
  const auto k = static_cast<Eigen::Index>(rows.size());
  Mask m(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const json& row = rows[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) {
      throw Error(ErrorCode::parse_error, "mask: row " + std::to_string(r) + " must have " +
                                              std::to_string(k) + " entries");
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      const json& v = row[c];
      if (v.is_boolean()) m(r, c) = v.get<bool>();
      else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) m(r, c) = v.get<int>() == 1;
      else throw Error(ErrorCode::parse_error, "mask: entries must be booleans or 0/1");
    }
  }
  return m;
}

Mask read_mask_json(const std::string& path) {
  try {
    return mask_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

Params params_from_json(const json& doc) {
  try {
    const auto alpha_v = doc.at("alpha").get<std::vector<double>>();
    const auto beta_v = doc.at("beta").get<std::vector<std::vector<double>>>();
    const auto k = static_cast<Eigen::Index>(alpha_v.size());
    if (static_cast<Eigen::Index>(beta_v.size()) != k) {
      throw Error(ErrorCode::parse_error, "params: beta must have one row per alpha entry");
    }
    Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(alpha_v.data(), k);
    Eigen::MatrixXd beta(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      if (static_cast<Eigen::Index>(beta_v[r].size()) != k) {
        throw Error(ErrorCode::parse_error, "params: beta row " + std::to_string(r) +
                                                " must have " + std::to_string(k) + " entries");
      }
      for (Eigen::Index c = 0; c < k; ++c) beta(r, c) = beta_v[r][c];
    }
    if (doc.contains("mask")) return Params(alpha, beta, mask_from_json(doc.at("mask")));
    return Params(alpha, beta);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("params: ") + e.what());
  }
}

json params_to_json(const Params& params) {
  return json{{"alpha", vector_json(params.alpha())},
              {"beta", matrix_json(params.beta())},
              {"mask", mask_json(params.mask())}};
}

Params read_params_json(const std::string& path) {
  try {
    return params_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::parse_error) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

json fit_to_json(const FitResult& fit, const FitMeta& meta) {
  const Params& p = fit.params_hat;
  const auto names = p.free_names();
  const Eigen::VectorXd theta = p.free_vector();
  const auto ci = confidence_intervals(fit, meta.ci_level);
  json params = json::array();
  for (std::size_t j = 0; j < names.size(); ++j) {
    params.push_back({{"name", names[j]},
                      {"estimate", theta[j]},
                      {"se", fit.se[j]},
                      {"ci_lo", ci[j].first},
                      {"ci_hi", ci[j].second}});
  }
  json doc{{"format", "mcg-fit"},
           {"version", kVersion},
           {"n", meta.n},
           {"n_tiles", fit.n_tiles},
           {"T", fit.T},
           {"n_colors", p.n_colors()},
           {"colors", meta.colors},
           {"p", fit.n_free()},
           {"n_obs", static_cast<long long>(fit.n_tiles) * fit.T},
           {"mask", mask_json(p.mask())},
           {"alpha", vector_json(p.alpha())},
           {"beta", matrix_json(p.beta())},
           {"ci_level", meta.ci_level},
           {"parameters", params},
           {"cov", matrix_json(fit.cov)},
           {"loglik", fit.loglik},
           {"aic", fit.aic},
           {"bic", fit.bic},
           {"iterations", fit.iterations},
           {"converged", fit.converged},
           {"grad_norm", fit.grad_norm}};
  if (meta.selection) {
    const auto& s = *meta.selection;
    json tables = json::array();
    for (const auto& table : s.per_color_tables) {
      json rows = json::array();
      for (const auto& cand : table) {
        json row{{"terms", cand.terms}, {"ok", cand.ok}};
        if (cand.ok) {
          row["loglik"] = cand.loglik;
          row["value"] = cand.value;
        } else {
          row["error"] = cand.error;
        }
        rows.push_back(std::move(row));
      }
      tables.push_back(std::move(rows));
    }
    doc["selection"] = {{"criterion", to_string(s.criterion)},
                        {"best_value", s.best_value},
                        {"best_mask", mask_json(s.best_mask)},
                        {"ties", s.ties},
                        {"skipped", s.skipped},
                        {"per_color", tables}};
  }
  return doc;
}

json bootstrap_to_json(const FitResult& fit, const BootstrapResult& boot, double ci_level,
                       std::uint64_t rng_seed) {
  const Eigen::VectorXd theta = fit.params_hat.free_vector();
  const auto names = fit.params_hat.free_names();
  const auto ci = confidence_intervals(theta, boot.se_boot, ci_level);
  json params = json::array();
  for (std::size_t j = 0; j < names.size(); ++j) {
    params.push_back({{"name", names[j]},
                      {"estimate", theta[j]},
                      {"se_sandwich", fit.se[j]},
                      {"se_boot", boot.se_boot[j]},
                      {"boot_mean", boot.mean[j]},
                      {"ci_lo", ci[j].first},
                      {"ci_hi", ci[j].second}});
  }
  return json{{"format", "mcg-bootstrap"},
              {"version", kVersion},
              {"B", boot.B},
              {"rng", rng_seed},
              {"failed", boot.failed},
              {"retried", boot.retried},
              {"ci_level", ci_level},
              {"mask", mask_json(fit.params_hat.mask())},
              {"parameters", params},
              {"cov_boot", matrix_json(boot.cov_boot)}};
}

json report_to_json(const MonteCarloReport& r) {
  const MCDesign& d = r.design;
  json criteria = json::array();
  for (auto c : d.criteria) criteria.push_back(to_string(c));
  json doc{{"format", "mcg-montecarlo"},
           {"version", kVersion},
           {"table", r.table},
           {"design",
            {{"model", d.custom ? json("custom") : json(d.model_id)},
             {"n", d.n},
             {"T", d.T},
             {"replicates", d.n_replicates},
             {"rng", d.rng_seed},
             {"seed_count", d.seed_count},
             {"bootstrap_B", d.bootstrap_B},
             {"levels", d.levels},
             {"criteria", criteria},
             {"fit_full_model", d.fit_full_model},
             {"truth", params_to_json(d.truth())}}},
           {"n_ok", r.n_ok},
           {"n_failed", r.n_failed}};
  if (r.table == 1) {
    json params = json::array();
    for (std::size_t j = 0; j < r.names.size(); ++j) {
      params.push_back({{"name", r.names[j]},
                        {"truth", r.truth[j]},
                        {"bias_sq_e6", r.bias_sq[j] / 1e-6},
                        {"variance_e4", r.variance[j] / 1e-4}});
    }
    doc["parameters"] = params;
    doc["bias_sq_e6"] = {{"mean", r.bias_sq_mean.value / 1e-6}, {"se", r.bias_sq_mean.se / 1e-6}};
    doc["variance_e4"] = {{"mean", r.variance_mean.value / 1e-4}, {"se", r.variance_mean.se / 1e-4}};
  }
  if (r.table == 2) {
    json cov = json::array();
    for (const auto& cell : r.coverage) {
      cov.push_back({{"level", cell.level},
                     {"method", cell.method},
                     {"coverage_pct", 100.0 * cell.rate.value},
                     {"se_pct", 100.0 * cell.rate.se}});
    }
    doc["coverage"] = cov;
  }
  if (r.table == 3) {
    json sel = json::array();
    for (const auto& s : r.selection) {
      sel.push_back({{"criterion", to_string(s.criterion)},
                     {"type_a_pct", s.type_a.value},
                     {"type_a_se", s.type_a.se},
                     {"type_b_pct", s.type_b.value},
                     {"type_b_se", s.type_b.se}});
    }
    doc["selection"] = sel;
    doc["denominators"] =
        "type A: true nonzero interaction entries x replicates; "
        "type B: true zero interaction entries x replicates";
  }
  return doc;
}

void write_qq_csv(std::ostream& out, const std::vector<QQRow>& rows,
                  const std::vector<std::string>& colors) {
  out << "t,color,prob,observed_q,predicted_q,lo,hi,covered\n";
  for (const auto& row : rows) {
    const auto& b = row.band;
    const std::string label =
        row.color < static_cast<int>(colors.size()) ? colors[row.color] : std::to_string(row.color);
    for (std::size_t k = 0; k < b.probs.size(); ++k) {
      out << row.t << ',' << label << ',' << format_real(b.probs[k]) << ','
          << format_real(b.observed_q[k]) << ',' << format_real(b.predicted_q[k]) << ','
          << format_real(b.lo[k]) << ',' << format_real(b.hi[k]) << ',' << (b.covered ? 1 : 0)
          << '\n';
    }
  }
}

}  // namespace mcg
