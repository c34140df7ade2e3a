// Copyright 2026 The cosmf Authors
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

#include "cosmf/io.hpp"

#include "cosmf/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cosmf {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

void format_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  require(j.is_object(), ErrorCode::kParse, what + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(allowed.count(it.key()) > 0, ErrorCode::kParse, what + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_int(const Json& j, const std::string& key, const std::string& what) {
  const Json& v = j.at(key);
  require(v.is_number_integer(), ErrorCode::kParse, what + ": '" + key + "' must be an integer");
  return v.get<T>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& what) {
  const Json& v = j.at(key);
  require(v.is_string(), ErrorCode::kParse, what + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

Json index_list(const std::vector<Index>& v) {
  Json a = Json::array();
  for (Index i : v) a.push_back(i);
  return a;
}

}  // namespace

Matrix parse_matrix_csv(const std::string& text, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t field = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      ++field;
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      require(!cell.empty() && ec == std::errc() && ptr == last, ErrorCode::kParse,
              source + ": line " + std::to_string(line_no) + ", column " + std::to_string(field) +
                  ": cannot parse '" + cell + "' as a number");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::kParse, source + ": line " + std::to_string(line_no) + ": ragged row with " +
                                  std::to_string(row.size()) + " values, expected " +
                                  std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::kParse, source + ": zero rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return m;
}

std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 20);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out.push_back(',');
      format_double(out, m(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

Matrix read_matrix(const std::string& path) { return parse_matrix_csv(read_file(path), path); }

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << text;
  require(out.good(), ErrorCode::kIo, "failed writing '" + path + "'");
}

void write_matrix(const Matrix& m, const std::string& path) {
  require(m.rows() > 0 && m.cols() > 0, ErrorCode::kInvalidArgument, "write_matrix: empty matrix");
  write_text(format_matrix_csv(m), path);
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, source + ": " + e.what());
  }
}

Json read_json(const std::string& path) { return parse_json(read_file(path), path); }

void write_json(const Json& j, const std::string& path) { write_text(j.dump(2) + "\n", path); }

SpatialResponse spatial_from_json(const Json& j) {
  const std::string what = "spatial response";
  try {
    check_keys(j, {"L", "Lh", "windows"}, what);
    const auto l = get_int<Index>(j, "L", what);
    const auto lh = get_int<Index>(j, "Lh", what);
    const Json& ws = j.at("windows");
    require(ws.is_array(), ErrorCode::kParse, what + ": 'windows' must be an array");
    require(static_cast<Index>(ws.size()) == lh, ErrorCode::kParse,
            what + ": " + std::to_string(ws.size()) + " windows but Lh = " + std::to_string(lh));
    std::vector<Window> windows;
    for (const Json& w : ws) {
      check_keys(w, {"pixels", "weights"}, what + " window");
      Window win;
      for (const Json& p : w.at("pixels")) {
        require(p.is_number_integer(), ErrorCode::kParse, what + ": pixel indices must be integers");
        win.pixels.push_back(p.get<Index>());
      }
      for (const Json& g : w.at("weights")) win.weights.push_back(json_real(g, what + " weight"));
      windows.push_back(std::move(win));
    }
    return SpatialResponse(l, std::move(windows));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, what + ": " + e.what());
  }
}

Json to_json(const SpatialResponse& g) {
  Json ws = Json::array();
  for (const Window& w : g.windows()) ws.push_back({{"pixels", index_list(w.pixels)}, {"weights", w.weights}});
  return {{"L", g.sr_pixels()}, {"Lh", g.hs_pixels()}, {"windows", std::move(ws)}};
}

SpatialResponse read_spatial(const std::string& path) { return spatial_from_json(read_json(path)); }

void write_spatial(const SpatialResponse& g, const std::string& path) { write_json(to_json(g), path); }

double json_real(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity" || s == "Infinity" || s == "+Infinity")
      return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-infinity" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  fail(ErrorCode::kParse, what + ": expected a number or \"inf\", got " + j.dump());
}

Json json_real(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(json_real(v(i)));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

SceneConfig scene_config_from_json(const Json& j) {
  const std::string what = "scene config";
  SceneConfig c;
  try {
    check_keys(j, {"M", "Mm", "N", "width", "height", "factor", "k_max", "kernel", "kernel_size",
                   "kernel_variance", "sampling", "max_draws", "seed"},
               what);
    if (j.contains("M")) c.bands = get_int<Index>(j, "M", what);
    if (j.contains("Mm")) c.ms_bands = get_int<Index>(j, "Mm", what);
    if (j.contains("N")) c.endmembers = get_int<Index>(j, "N", what);
    if (j.contains("width")) c.width = get_int<Index>(j, "width", what);
    if (j.contains("height")) c.height = get_int<Index>(j, "height", what);
    if (j.contains("factor")) c.factor = get_int<Index>(j, "factor", what);
    if (j.contains("k_max")) c.max_support = get_int<int>(j, "k_max", what);
    if (j.contains("kernel")) c.kernel = parse_kernel_kind(get_string(j, "kernel", what));
    if (j.contains("kernel_size")) c.kernel_size = get_int<Index>(j, "kernel_size", what);
    if (j.contains("kernel_variance")) c.kernel_variance = json_real(j.at("kernel_variance"), what);
    if (j.contains("sampling")) c.sampling = parse_endmember_sampling(get_string(j, "sampling", what));
    if (j.contains("max_draws")) c.max_draws = get_int<int>(j, "max_draws", what);
    if (j.contains("seed")) c.seed = get_int<std::uint64_t>(j, "seed", what);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, what + ": " + e.what());
  }
  return c;
}

Json to_json(const SceneConfig& c) {
  return {{"M", c.bands},
          {"Mm", c.ms_bands},
          {"N", c.endmembers},
          {"width", c.width},
          {"height", c.height},
          {"factor", c.factor},
          {"k_max", c.max_support},
          {"kernel", to_string(c.kernel)},
          {"kernel_size", c.kernel_size},
          {"kernel_variance", c.kernel_variance},
          {"sampling", to_string(c.sampling)},
          {"max_draws", c.max_draws},
          {"seed", c.seed}};
}

SolverConfig solver_config_from_json(const Json& j) {
  const std::string what = "solver config";
  SolverConfig c;
  try {
    check_keys(j, {"max_outer_iterations", "inner_steps", "relative_tolerance", "step_rule", "init", "seed",
                   "support_threshold"},
               what);
    if (j.contains("max_outer_iterations")) c.max_outer_iterations = get_int<int>(j, "max_outer_iterations", what);
    if (j.contains("inner_steps")) c.inner_steps = get_int<int>(j, "inner_steps", what);
    if (j.contains("relative_tolerance")) c.relative_tolerance = json_real(j.at("relative_tolerance"), what);
    if (j.contains("step_rule")) c.step_rule = parse_step_rule(get_string(j, "step_rule", what));
    if (j.contains("init")) c.init = parse_init_mode(get_string(j, "init", what));
    if (j.contains("seed")) c.seed = get_int<std::uint64_t>(j, "seed", what);
    if (j.contains("support_threshold")) c.support_threshold = json_real(j.at("support_threshold"), what);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, what + ": " + e.what());
  }
  return c;
}

Json to_json(const SolverConfig& c) {
  return {{"max_outer_iterations", c.max_outer_iterations},
          {"inner_steps", c.inner_steps},
          {"relative_tolerance", c.relative_tolerance},
          {"step_rule", to_string(c.step_rule)},
          {"init", to_string(c.init)},
          {"seed", c.seed},
          {"support_threshold", c.support_threshold}};
}

Json to_json(const ValidationReport& r) {
  Json v = Json::array();
  for (const Violation& x : r.violations)
    v.push_back({{"invariant", x.invariant}, {"location", x.location}, {"magnitude", json_real(x.magnitude)}});
  return {{"valid", r.ok()}, {"violations", std::move(v)}};
}

Json to_json(const AssumptionReport& r) {
  return {
      {"all_pass", r.all()},
      {"full_rank", {{"pass", r.full_rank},
                     {"endmember_rank_ratio", json_real(r.endmember_rank_ratio)},
                     {"abundance_rank_ratio", json_real(r.abundance_rank_ratio)}}},
      {"sparsity", {{"pass", r.sparse},
                    {"K", r.kruskal_rank},
                    {"max_support", r.max_support},
                    {"worst_column", r.worst_column}}},
      {"pure_pixels", {{"pass", r.pure_pixels},
                       {"columns", index_list(r.pure_columns)},
                       {"max_deviation", json_real(r.pure_deviation)}}},
      {"dominance", {{"pass", r.dominance},
                     {"epsilon", json_real(r.epsilon)},
                     {"threshold", json_real(r.epsilon_threshold)},
                     {"ineligible_columns", index_list(r.ineligible_columns)}}},
  };
}

Json to_json(const Certificate& c) {
  return {{"K", c.kruskal_rank},
          {"epsilon", json_real(c.epsilon)},
          {"kappa", json_real(c.kappa)},
          {"C", json_real(c.c)},
          {"sigma_max_A", json_real(c.sigma_max_endmembers)},
          {"gamma", vector_json(c.gamma)},
          {"per_pixel_bound", vector_json(c.per_pixel_bound)},
          {"max_bound", json_real(c.max_bound())},
          {"guarantee_applies", c.guarantee_applies()},
          {"assumptions", to_json(c.assumptions)}};
}

Json to_json(const AlignmentReport& r) {
  return {{"R", matrix_json(r.r)},
          {"R_inverse", matrix_json(r.r_inverse)},
          {"row_order", index_list(r.row_order)},
          {"R_tilde", matrix_json(r.r_tilde)},
          {"method", r.method},
          {"pivot_rule_holds", r.pivot_rule_holds},
          {"rho", json_real(r.rho)},
          {"beta", json_real(r.beta)},
          {"sigma_min_R_tilde", json_real(r.sigma_min_r_tilde)},
          {"epsilon", json_real(r.epsilon)},
          {"r_in_simplex", r.r_in_simplex},
          {"simplex_violation", json_real(r.simplex_violation)},
          {"off_diagonal_within_epsilon", r.off_diagonal_within_epsilon},
          {"off_diagonal_margin", json_real(r.off_diagonal_margin)},
          {"pure_cross_check", json_real(r.pure_cross_check)}};
}

Json to_json(const AbundanceErrorReport& r) {
  Json out = {{"applicable", r.applicable}, {"reason", r.reason}};
  if (!r.applicable) return out;
  out["inequality_holds"] = r.inequality_holds;
  out["chain_holds"] = r.chain_holds;
  out["min_slack"] = json_real(r.min_slack);
  out["worst_pixel"] = r.worst_pixel;
  out["lhs"] = vector_json(r.lhs);
  out["rhs"] = vector_json(r.rhs);
  out["reconstruction_error"] = vector_json(r.recon_error);
  return out;
}

Json to_json(const MonteCarloRate& r) {
  return {{"trials", r.trials},
          {"successes", r.successes},
          {"empirical", json_real(r.rate)},
          {"analytic", json_real(r.analytic)},
          {"analytic_raw", json_real(r.analytic_raw)},
          {"sigma", json_real(r.sigma)},
          {"empirical_at_least_analytic_minus_3sigma", r.rate >= r.analytic - 3.0 * r.sigma}};
}

Json to_json(const CounterexampleReport& r) {
  Json grid = Json::array();
  for (std::size_t i = 0; i < r.grid_alpha.size(); ++i)
    grid.push_back({{"alpha1", r.grid_alpha[i]}, {"error", json_real(r.grid_error[i])},
                    {"objective", json_real(r.grid_objective[i])}});
  return {{"rho", r.rho},
          {"alpha1", r.alpha1},
          {"objective", json_real(r.objective)},
          {"error", json_real(r.error)},
          {"expected_error", json_real(r.expected_error)},
          {"identity_holds", r.identity_holds},
          {"grid_sup", json_real(r.grid_sup)},
          {"expected_sup", json_real(r.expected_sup)},
          {"sup_holds", r.sup_holds},
          {"certificate_bound", json_real(r.certificate_bound)},
          {"within_bound", r.within_bound},
          {"feasible", r.feasible},
          {"grid", std::move(grid)}};
}

Json to_json(const Solution& s) {
  Json trace = Json::array();
  for (double v : s.objective_trace) trace.push_back(json_real(v));
  return {{"objective", json_real(s.objective())},
          {"iterations", s.iterations},
          {"termination", to_string(s.termination)},
          {"objective_trace", std::move(trace)}};
}

Json scene_sidecar(const GeneratedScene& g, const SceneConfig& config) {
  Json supports = Json::array();
  for (const auto& s : g.cell_supports) supports.push_back(s);
  return {{"seed", g.seed},
          {"config", to_json(config)},
          {"pure_windows", index_list(g.pure_windows)},
          {"cell_columns", g.cell_columns},
          {"cell_rows", g.cell_rows},
          {"cell_supports", std::move(supports)},
          {"endmember_draws", g.endmember_draws}};
}

}  // namespace cosmf
