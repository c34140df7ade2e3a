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

#include "cosmf/experiment.hpp"

#include "cosmf/bounds.hpp"
#include "cosmf/error.hpp"
#include "cosmf/rng.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <thread>

namespace cosmf {

namespace {

struct TrialTruth {
  GeneratedScene scene;
  Certificate certificate;
  ObservedPair clean;
};

TrialResult run_one(const ExperimentConfig& config, const Matrix& spectral, const SpatialResponse& spatial,
                    const TrialTruth& truth, std::size_t snr_index, int trial) {
  TrialResult r;
  r.snr_db = config.snr_db[snr_index];
  r.trial = trial;
  const auto t = static_cast<std::uint64_t>(trial);
  const auto s = static_cast<std::uint64_t>(snr_index);
  const Matrix ms = add_noise(truth.clean.ms, r.snr_db, derive_seed(config.seed, {t, s, 1}));
  const Matrix hs = add_noise(truth.clean.hs, r.snr_db, derive_seed(config.seed, {t, s, 2}));
  SolverConfig sc = config.solver;
  sc.seed = derive_seed(config.seed, {t, s, 3});
  const Problem problem{ms, hs, spectral, spatial};
  const Solution sol = solve_cosmf(problem, config.scene.endmembers, sc);
  const Matrix& x = truth.scene.scene.image;
  const Matrix recovered = reconstruct(sol.endmembers, sol.abundances);
  r.mse = mse(x, recovered);
  r.max_pixel_error = (x - recovered).colwise().norm().maxCoeff();
  r.bound_max = truth.certificate.max_bound();
  r.objective = sol.objective();
  r.iterations = sol.iterations;
  return r;
}

void append_real(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void ExperimentConfig::validate() const {
  scene.validate();
  solver.validate();
  require(trials >= 1, ErrorCode::kInvalidArgument, "experiment: trial count must be >= 1");
  require(!snr_db.empty(), ErrorCode::kInvalidArgument, "experiment: SNR list is empty");
  for (double v : snr_db)
    require(!std::isnan(v) && v != -std::numeric_limits<double>::infinity(), ErrorCode::kInvalidArgument,
            "experiment: SNR values must be finite or +inf");
  require(threads >= 0, ErrorCode::kInvalidArgument, "experiment: threads must be >= 0");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Matrix spectral = build_spectral_response(config.scene.bands, config.scene.ms_bands);
  const SpatialResponse spatial = build_spatial_response(config.scene);
  const std::size_t n_snr = config.snr_db.size();
  const auto n_trials = static_cast<std::size_t>(config.trials);

  // The scene of a trial is shared by every SNR level so the sweep is paired.
  std::vector<std::optional<TrialTruth>> truths(n_trials);
  std::vector<std::string> truth_errors(n_trials);
  std::vector<TrialResult> rows(n_snr * n_trials);

  unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(config.threads);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(rows.size()));

  auto run_stage = [&](std::size_t count, auto&& task) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    };
    if (workers <= 1) {
      worker();
      return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  };

  run_stage(n_trials, [&](std::size_t t) {
    try {
      SceneConfig sc = config.scene;
      sc.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(t)});
      TrialTruth truth;
      truth.scene = generate_scene(sc, spectral, spatial);
      truth.certificate = certify(truth.scene.scene.endmembers, truth.scene.scene.abundances, spectral, spatial);
      truth.clean = observe(truth.scene.scene.image, spectral, spatial);
      truths[t] = std::move(truth);
    } catch (const std::exception& e) {
      truth_errors[t] = e.what();
    }
  });

  run_stage(rows.size(), [&](std::size_t i) {
    const std::size_t s = i / n_trials;
    const std::size_t t = i % n_trials;
    TrialResult r;
    r.snr_db = config.snr_db[s];
    r.trial = static_cast<int>(t);
    if (!truths[t]) {
      r.error = "scene generation failed: " + truth_errors[t];
    } else {
      try {
        r = run_one(config, spectral, spatial, *truths[t], s, static_cast<int>(t));
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
    if (!r.ok()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.mse = r.max_pixel_error = r.bound_max = r.objective = nan;
      r.iterations = 0;
    }
    rows[i] = std::move(r);
  });

  ExperimentResult out;
  out.rows = std::move(rows);
  out.snr_db = config.snr_db;
  out.mean_mse.assign(n_snr, 0.0);
  out.completed.assign(n_snr, 0);
  for (std::size_t s = 0; s < n_snr; ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
      const TrialResult& r = out.rows[s * n_trials + t];
      if (!r.ok()) continue;
      sum += r.mse;
      ++out.completed[s];
    }
    out.mean_mse[s] = out.completed[s] > 0 ? sum / out.completed[s] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::string ExperimentResult::csv() const {
  std::string out = "snr_db,trial,mse,max_pixel_error,bound_max,objective,iters\n";
  for (const TrialResult& r : rows) {
    append_real(out, r.snr_db);
    out += ',' + std::to_string(r.trial) + ',';
    append_real(out, r.mse);
    out += ',';
    append_real(out, r.max_pixel_error);
    out += ',';
    append_real(out, r.bound_max);
    out += ',';
    append_real(out, r.objective);
    out += ',' + std::to_string(r.iterations) + '\n';
  }
  return out;
}

Json ExperimentResult::summary() const {
  Json levels = Json::array();
  for (std::size_t s = 0; s < snr_db.size(); ++s)
    levels.push_back({{"snr_db", json_real(snr_db[s])},
                      {"mean_mse", json_real(mean_mse[s])},
                      {"completed_trials", completed[s]}});
  Json failures = Json::array();
  for (const TrialResult& r : rows)
    if (!r.ok()) failures.push_back({{"snr_db", json_real(r.snr_db)}, {"trial", r.trial}, {"error", r.error}});
  return {{"levels", std::move(levels)}, {"failures", std::move(failures)}};
}

ExperimentResult run_experiment_to_disk(const ExperimentConfig& config) {
  require(!config.output_dir.empty(), ErrorCode::kInvalidArgument, "experiment: output directory not set");
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create '" + config.output_dir + "': " + ec.message());
  ExperimentResult result = run_experiment(config);
  const std::filesystem::path dir(config.output_dir);
  write_text(result.csv(), (dir / "results.csv").string());
  Json summary = result.summary();
  summary["config"] = to_json(config);
  write_json(summary, (dir / "summary.json").string());
  return result;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  const std::string what = "experiment config";
  ExperimentConfig c;
  require(j.is_object(), ErrorCode::kParse, what + ": expected a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "scene") {
        c.scene = scene_config_from_json(v);
      } else if (k == "solver") {
        c.solver = solver_config_from_json(v);
      } else if (k == "snr_db") {
        require(v.is_array(), ErrorCode::kParse, what + ": 'snr_db' must be an array");
        c.snr_db.clear();
        for (const Json& x : v) c.snr_db.push_back(json_real(x, what + " snr_db"));
      } else if (k == "trials") {
        require(v.is_number_integer(), ErrorCode::kParse, what + ": 'trials' must be an integer");
        c.trials = v.get<int>();
      } else if (k == "output_dir") {
        require(v.is_string(), ErrorCode::kParse, what + ": 'output_dir' must be a string");
        c.output_dir = v.get<std::string>();
      } else if (k == "seed") {
        require(v.is_number_integer(), ErrorCode::kParse, what + ": 'seed' must be an integer");
        c.seed = v.get<std::uint64_t>();
      } else if (k == "threads") {
        require(v.is_number_integer(), ErrorCode::kParse, what + ": 'threads' must be an integer");
        c.threads = v.get<int>();
      } else {
        fail(ErrorCode::kParse, what + ": unknown key '" + k + "'");
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, what + ": " + e.what());
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json snr = Json::array();
  for (double v : c.snr_db) snr.push_back(json_real(v));
  return {{"scene", to_json(c.scene)}, {"snr_db", std::move(snr)}, {"trials", c.trials},
          {"solver", to_json(c.solver)}, {"output_dir", c.output_dir}, {"seed", c.seed},
          {"threads", c.threads}};
}

}  // namespace cosmf
