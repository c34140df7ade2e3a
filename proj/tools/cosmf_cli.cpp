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

// cosmf command-line tool.  Exit codes: 0 success, 1 failure reported by the
// library (invalid input, numerical failure, ...), 2 usage error.

#include "cosmf/cosmf.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Failure {
  std::string message;
};

void check(cosmf_status st, const std::string& context) {
  if (st != COSMF_OK)
    throw Failure{context + ": " + cosmf_status_name(st) + ": " + cosmf_last_error()};
}

struct MatrixFree {
  void operator()(cosmf_matrix* m) const { cosmf_matrix_free(m); }
};
struct SpatialFree {
  void operator()(cosmf_spatial* g) const { cosmf_spatial_free(g); }
};
struct SceneFree {
  void operator()(cosmf_scene* s) const { cosmf_scene_free(s); }
};
struct SolutionFree {
  void operator()(cosmf_solution* s) const { cosmf_solution_free(s); }
};
using MatrixPtr = std::unique_ptr<cosmf_matrix, MatrixFree>;
using SpatialPtr = std::unique_ptr<cosmf_spatial, SpatialFree>;
using ScenePtr = std::unique_ptr<cosmf_scene, SceneFree>;
using SolutionPtr = std::unique_ptr<cosmf_solution, SolutionFree>;

MatrixPtr load_matrix(const std::string& path) {
  cosmf_matrix* m = nullptr;
  check(cosmf_matrix_read_csv(path.c_str(), &m), "reading " + path);
  return MatrixPtr(m);
}

SpatialPtr load_spatial(const std::string& path) {
  cosmf_spatial* g = nullptr;
  check(cosmf_spatial_read_json(path.c_str(), &g), "reading " + path);
  return SpatialPtr(g);
}

void save_matrix(const cosmf_matrix* m, const fs::path& path) {
  check(cosmf_matrix_write_csv(m, path.string().c_str()), "writing " + path.string());
}

void save_spatial(const cosmf_spatial* g, const fs::path& path) {
  check(cosmf_spatial_write_json(g, path.string().c_str()), "writing " + path.string());
}

Json take_json(char* s) {
  Json j = Json::parse(s);
  cosmf_string_free(s);
  return j;
}

void save_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{"cannot open '" + path.string() + "' for writing"};
  out << text;
  if (!out) throw Failure{"failed writing '" + path.string() + "'"};
}

void save_json(const Json& j, const fs::path& path) { save_text(j.dump(2) + "\n", path); }

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{"cannot create '" + dir + "': " + ec.message()};
  return fs::path(dir);
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{"cannot open '" + path + "' for reading"};
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw Failure{path + ": " + e.what()};
  }
}

// Real-valued flag that also accepts "inf".
double parse_real(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "Inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument(text);
  return v;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string image, spectral, spatial, ms, hs;
  std::string endmembers, abundances, true_endmembers, true_abundances;
  std::string init_endmembers, init_abundances;
  std::string snr = "inf";
  std::size_t n_endmembers = 0;
  double rho = 0.1;
  double alpha1 = 0.0;
  int grid = 21;
  int dominance_n = 2;
  int dominance_m = 64;
  std::int64_t trials = 10000;
  std::optional<int> threads;
};

void cmd_generate(const Options& o) {
  Json cfg = load_config(o.config);
  if (o.seed) cfg["seed"] = *o.seed;
  cosmf_scene* raw = nullptr;
  check(cosmf_scene_generate(cfg.dump().c_str(), &raw), "generate");
  ScenePtr scene(raw);
  const fs::path dir = prepare_dir(o.out);
  save_matrix(cosmf_scene_endmembers(scene.get()), dir / "A.csv");
  save_matrix(cosmf_scene_abundances(scene.get()), dir / "S.csv");
  save_matrix(cosmf_scene_image(scene.get()), dir / "X.csv");
  save_matrix(cosmf_scene_spectral(scene.get()), dir / "F.csv");
  save_spatial(cosmf_scene_spatial(scene.get()), dir / "G.json");
  char* meta = nullptr;
  check(cosmf_scene_metadata_json(scene.get(), &meta), "generate");
  const Json j = take_json(meta);
  save_json(j, dir / "scene.json");
  print({{"out", dir.string()},
         {"files", {"A.csv", "S.csv", "X.csv", "F.csv", "G.json", "scene.json"}},
         {"seed", j["seed"]},
         {"endmember_draws", j["endmember_draws"]}});
}

void cmd_observe(const Options& o) {
  const MatrixPtr x = load_matrix(o.image);
  const MatrixPtr f = load_matrix(o.spectral);
  const SpatialPtr g = load_spatial(o.spatial);
  const double snr = parse_real(o.snr);
  const std::uint64_t seed = o.seed.value_or(0);
  cosmf_matrix* ms_raw = nullptr;
  cosmf_matrix* hs_raw = nullptr;
  check(cosmf_observe(x.get(), f.get(), g.get(), &ms_raw, &hs_raw), "observe");
  MatrixPtr ms(ms_raw);
  MatrixPtr hs(hs_raw);
  if (!std::isinf(snr)) {
    // Independent noise streams for the two images.
    cosmf_matrix* noisy = nullptr;
    check(cosmf_add_noise(ms.get(), snr, seed * 2 + 0, &noisy), "observe");
    ms.reset(noisy);
    check(cosmf_add_noise(hs.get(), snr, seed * 2 + 1, &noisy), "observe");
    hs.reset(noisy);
  }
  const fs::path dir = prepare_dir(o.out);
  save_matrix(ms.get(), dir / "YM.csv");
  save_matrix(hs.get(), dir / "YH.csv");
  print({{"out", dir.string()}, {"files", {"YM.csv", "YH.csv"}}, {"snr_db", o.snr}, {"seed", seed}});
}

void cmd_solve(const Options& o) {
  const MatrixPtr ms = load_matrix(o.ms);
  const MatrixPtr hs = load_matrix(o.hs);
  const MatrixPtr f = load_matrix(o.spectral);
  const SpatialPtr g = load_spatial(o.spatial);
  MatrixPtr a0;
  MatrixPtr s0;
  if (!o.init_endmembers.empty()) a0 = load_matrix(o.init_endmembers);
  if (!o.init_abundances.empty()) s0 = load_matrix(o.init_abundances);
  Json cfg = load_config(o.config);
  if (o.seed) cfg["seed"] = *o.seed;
  if ((a0 || s0) && !cfg.contains("init")) cfg["init"] = "provided";
  cosmf_solution* raw = nullptr;
  check(cosmf_solve(ms.get(), hs.get(), f.get(), g.get(), o.n_endmembers, cfg.dump().c_str(), a0.get(), s0.get(),
                    &raw),
        "solve");
  SolutionPtr sol(raw);
  char* rep = nullptr;
  check(cosmf_solution_report_json(sol.get(), &rep), "solve");
  Json report = take_json(rep);
  report["config"] = cfg;
  const fs::path dir = prepare_dir(o.out);
  save_matrix(cosmf_solution_endmembers(sol.get()), dir / "A_hat.csv");
  save_matrix(cosmf_solution_abundances(sol.get()), dir / "S_hat.csv");
  save_json(report, dir / "solve.json");
  report.erase("objective_trace");
  report["files"] = {"A_hat.csv", "S_hat.csv", "solve.json"};
  print(report);
}

// Model invariants must hold before bounds are computed.
bool validated(const cosmf_matrix* a, const cosmf_matrix* s, const cosmf_matrix* f, const cosmf_spatial* g) {
  char* raw = nullptr;
  check(cosmf_validate_model(a, s, f, g, &raw), "validate");
  const Json report = take_json(raw);
  if (report.at("valid").get<bool>()) return true;
  std::cerr << "error: input is not a valid model instance\n";
  print(report);
  return false;
}

int cmd_certify(const Options& o) {
  const MatrixPtr a = load_matrix(o.endmembers);
  const MatrixPtr s = load_matrix(o.abundances);
  const MatrixPtr f = load_matrix(o.spectral);
  const SpatialPtr g = load_spatial(o.spatial);
  if (!validated(a.get(), s.get(), f.get(), g.get())) return 1;
  char* raw = nullptr;
  check(cosmf_certify(a.get(), s.get(), f.get(), g.get(), &raw), "certify");
  const Json j = take_json(raw);
  if (!o.out.empty()) save_json(j, prepare_dir(o.out) / "certificate.json");
  print(j);
  return 0;
}

int cmd_align(const Options& o) {
  const MatrixPtr ta = load_matrix(o.true_endmembers);
  const MatrixPtr ts = load_matrix(o.true_abundances);
  const MatrixPtr a = load_matrix(o.endmembers);
  const MatrixPtr s = load_matrix(o.abundances);
  const MatrixPtr f = load_matrix(o.spectral);
  const SpatialPtr g = load_spatial(o.spatial);
  if (!validated(ta.get(), ts.get(), f.get(), g.get())) return 1;
  char* raw = nullptr;
  check(cosmf_align(ta.get(), ts.get(), a.get(), s.get(), f.get(), g.get(), &raw), "align");
  const Json j = take_json(raw);
  if (!o.out.empty()) save_json(j, prepare_dir(o.out) / "alignment.json");
  print(j);
  return 0;
}

void cmd_counterexample(const Options& o) {
  char* raw = nullptr;
  check(cosmf_counterexample(o.rho, o.alpha1, o.grid, &raw), "counterexample");
  const Json j = take_json(raw);
  if (!o.out.empty()) {
    const fs::path dir = prepare_dir(o.out);
    cosmf_matrix *a = nullptr, *s = nullptr, *f = nullptr;
    cosmf_spatial* g = nullptr;
    check(cosmf_counterexample_instance(o.rho, &a, &s, &f, &g), "counterexample");
    const MatrixPtr ap(a), sp(s), fp(f);
    const SpatialPtr gp(g);
    cosmf_matrix* x = nullptr;
    check(cosmf_reconstruct(a, s, &x), "counterexample");
    const MatrixPtr xp(x);
    cosmf_matrix *ym = nullptr, *yh = nullptr;
    check(cosmf_observe(x, f, g, &ym, &yh), "counterexample");
    const MatrixPtr ymp(ym), yhp(yh);
    save_matrix(a, dir / "A.csv");
    save_matrix(s, dir / "S.csv");
    save_matrix(f, dir / "F.csv");
    save_spatial(g, dir / "G.json");
    save_matrix(ym, dir / "YM.csv");
    save_matrix(yh, dir / "YH.csv");
    save_json(j, dir / "counterexample.json");
    std::ostringstream csv;
    csv.precision(17);
    csv << "alpha1,error,objective\n";
    for (const Json& p : j.at("grid"))
      csv << p.at("alpha1").get<double>() << ',' << p.at("error").get<double>() << ','
          << p.at("objective").get<double>() << '\n';
    save_text(csv.str(), dir / "surface.csv");
  }
  print(j);
}

void cmd_dominance(const Options& o) {
  char* raw = nullptr;
  check(cosmf_dominance_probability(o.dominance_n, o.dominance_m, o.trials, o.seed.value_or(0), &raw), "lemma1");
  print(take_json(raw));
}

void cmd_experiment(const Options& o) {
  Json cfg = load_config(o.config);
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.threads) cfg["threads"] = *o.threads;
  char* raw = nullptr;
  check(cosmf_experiment(cfg.dump().c_str(), o.out.empty() ? nullptr : o.out.c_str(), &raw), "experiment");
  const Json summary = take_json(raw);
  print(summary);
  for (const Json& level : summary.at("levels"))
    if (level.at("completed_trials").get<int>() == 0)
      throw Failure{"experiment: no trial completed at one or more SNR levels"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled matrix factorisation for hyperspectral/multispectral fusion: synthetic scenes, "
               "solver, recovery certificates and diagnostics."};
  app.set_version_flag("--version", std::string(cosmf_version()));
  app.require_subcommand(1);
  Options o;

  auto seed_flag = [&](CLI::App* c, const std::string& help) {
    c->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; }, help);
  };

  CLI::App* gen = app.add_subcommand("generate", "Generate a synthetic ground-truth scene");
  gen->add_option("--config", o.config, "Scene config JSON (M, Mm, N, width, height, factor, k_max, kernel, "
                                        "kernel_size, kernel_variance, sampling, max_draws, seed)")
      ->check(CLI::ExistingFile);
  seed_flag(gen, "Master seed (overrides the config)");
  gen->add_option("--out", o.out, "Output directory for A.csv, S.csv, X.csv, F.csv, G.json, scene.json")
      ->required();

  CLI::App* obs = app.add_subcommand("observe", "Degrade an SR image into MS and HS observations");
  obs->add_option("--image", o.image, "SR image X (M x L CSV)")->required()->check(CLI::ExistingFile);
  obs->add_option("--F", o.spectral, "Spectral response F (Mm x M CSV)")->required()->check(CLI::ExistingFile);
  obs->add_option("--G", o.spatial, "Spatial response JSON")->required()->check(CLI::ExistingFile);
  obs->add_option("--snr", o.snr, "Noise level in dB (\"inf\" for none)");
  seed_flag(obs, "Noise seed");
  obs->add_option("--out", o.out, "Output directory for YM.csv, YH.csv")->required();

  CLI::App* sol = app.add_subcommand("solve", "Fit endmembers and abundances to an MS/HS pair");
  sol->add_option("--ym", o.ms, "MS image Y_M (Mm x L CSV)")->required()->check(CLI::ExistingFile);
  sol->add_option("--yh", o.hs, "HS image Y_H (M x Lh CSV)")->required()->check(CLI::ExistingFile);
  sol->add_option("--F", o.spectral, "Spectral response F CSV")->required()->check(CLI::ExistingFile);
  sol->add_option("--G", o.spatial, "Spatial response JSON")->required()->check(CLI::ExistingFile);
  sol->add_option("--N", o.n_endmembers, "Number of endmembers")->required()->check(CLI::PositiveNumber);
  sol->add_option("--config", o.config, "Solver config JSON (max_outer_iterations, inner_steps, "
                                        "relative_tolerance, step_rule, init, seed, support_threshold)")
      ->check(CLI::ExistingFile);
  sol->add_option("--A0", o.init_endmembers, "Initial endmembers CSV")->check(CLI::ExistingFile);
  sol->add_option("--S0", o.init_abundances, "Initial abundances CSV")->check(CLI::ExistingFile);
  seed_flag(sol, "Seed for random initialisation (overrides the config)");
  sol->add_option("--out", o.out, "Output directory for A_hat.csv, S_hat.csv, solve.json")->required();

  CLI::App* cer = app.add_subcommand("certify", "Recovery certificate of a ground-truth scene");
  cer->add_option("--A", o.endmembers, "Endmembers CSV")->required()->check(CLI::ExistingFile);
  cer->add_option("--S", o.abundances, "Abundances CSV")->required()->check(CLI::ExistingFile);
  cer->add_option("--F", o.spectral, "Spectral response F CSV")->required()->check(CLI::ExistingFile);
  cer->add_option("--G", o.spatial, "Spatial response JSON")->required()->check(CLI::ExistingFile);
  cer->add_option("--out", o.out, "Directory for certificate.json");

  CLI::App* ali = app.add_subcommand("align", "Align a recovered factorisation with the ground truth");
  ali->add_option("--A-true", o.true_endmembers, "True endmembers CSV")->required()->check(CLI::ExistingFile);
  ali->add_option("--S-true", o.true_abundances, "True abundances CSV")->required()->check(CLI::ExistingFile);
  ali->add_option("--A", o.endmembers, "Recovered endmembers CSV")->required()->check(CLI::ExistingFile);
  ali->add_option("--S", o.abundances, "Recovered abundances CSV")->required()->check(CLI::ExistingFile);
  ali->add_option("--F", o.spectral, "Spectral response F CSV")->required()->check(CLI::ExistingFile);
  ali->add_option("--G", o.spatial, "Spatial response JSON")->required()->check(CLI::ExistingFile);
  ali->add_option("--out", o.out, "Directory for alignment.json");

  CLI::App* cex = app.add_subcommand("counterexample", "Three-material instance with non-unique abundances");
  cex->add_option("--rho", o.rho, "Mixing parameter in [0, 0.5)");
  cex->add_option("--alpha1", o.alpha1, "Family parameter in [-rho, rho]");
  cex->add_option("--grid", o.grid, "Points in the alpha1 sweep")->check(CLI::Range(2, 1000000));
  cex->add_option("--out", o.out, "Directory for instance files, counterexample.json and surface.csv");

  CLI::App* lem = app.add_subcommand("lemma1", "Probability that uniform endmembers satisfy the dominance condition");
  lem->add_option("--n", o.dominance_n, "Number of endmembers N")->check(CLI::Range(2, 1000000));
  lem->add_option("--m", o.dominance_m, "Number of bands M")->check(CLI::PositiveNumber);
  lem->add_option("--trials", o.trials, "Monte Carlo draws (0 for the analytic value only)")
      ->check(CLI::NonNegativeNumber);
  seed_flag(lem, "Monte Carlo seed");

  CLI::App* exp = app.add_subcommand("experiment", "Seeded SNR sweep over generated scenes");
  exp->add_option("--config", o.config, "Experiment config JSON (scene, snr_db, trials, solver, output_dir, "
                                        "seed, threads)")
      ->check(CLI::ExistingFile);
  seed_flag(exp, "Master seed (overrides the config)");
  exp->add_option_function<int>("--threads", [&](const int& v) { o.threads = v; }, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  exp->add_option("--out", o.out, "Directory for results.csv and summary.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (obs->parsed()) {
      try {
        parse_real(o.snr);
      } catch (const std::exception&) {
        std::cerr << "--snr: expected a number or \"inf\", got '" << o.snr << "'\n";
        return 2;
      }
    }
    if (gen->parsed()) cmd_generate(o);
    else if (obs->parsed()) cmd_observe(o);
    else if (sol->parsed()) cmd_solve(o);
    else if (cer->parsed()) return cmd_certify(o);
    else if (ali->parsed()) return cmd_align(o);
    else if (cex->parsed()) cmd_counterexample(o);
    else if (lem->parsed()) cmd_dominance(o);
    else if (exp->parsed()) cmd_experiment(o);
    return 0;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
